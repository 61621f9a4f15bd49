"""Grammar trees: node model, notation parser, serializer.

The rule notation:

    expr : term ((PLUS | MINUS) term)* ;
    factor
        : INT | '(' expr ')' ;
    type
        : IDENTIFIER typeArguments?
        : basicType ;

- a rule is a name followed by one or more productions, each introduced
  by ':', and a closing ';'
- '|' separates alternatives, '*' '+' '?' are iteration suffixes,
  parentheses group, quoted literals are lexical text, '#empty' is the
  empty string, '//' starts a line comment
- a name with an uppercase first letter is a terminal and is never
  defined in the grammar; every other referenced name must have a rule

The parsed tree ("grammar tree") is the unit everything else in the
package works on: every node is an annotation target.  Normalization
keeps the shape canonical: parentheses leave no node behind, a
one-element sequence collapses to its element, and a production holds
its top-level concatenation items directly as children.  Node ids are
assigned in pre-order, so a pre-order walk yields ascending ids and the
assignment is stable across runs for identical input text.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NotationError
from .scan import Cursor, escape_string

GRAMMAR = "grammar"
SYMBOL_DEF = "symbol_def"
PRODUCTION = "production"
ALTERNATIVE = "alternative"
SEQUENCE = "sequence"
ITERATION = "iteration"
SYMBOL_REF = "symbol_ref"
EMPTY = "empty"
LITERAL = "literal"

ALL_KINDS = (GRAMMAR, SYMBOL_DEF, PRODUCTION, ALTERNATIVE, SEQUENCE,
             ITERATION, SYMBOL_REF, EMPTY, LITERAL)

STAR = "star"
PLUS = "plus"
OPT = "opt"

_SUFFIX_KIND = {"*": STAR, "+": PLUS, "?": OPT}


@dataclass(frozen=True, eq=False)
class GtNode:
    """One grammar tree node.

    detail holds the per-kind payload: the name for symbol_def/symbol_ref,
    the text for literal, the iteration kind (star/plus/opt) for iteration,
    None otherwise.  structure_key is a recursive (kind, detail, children)
    tuple: two nodes are structurally equal iff their keys are equal,
    regardless of ids and spans.
    """

    id: int
    kind: str
    detail: str | None
    children: tuple["GtNode", ...]
    span: tuple[int, int]
    structure_key: tuple = field(repr=False)

    def is_terminal_ref(self) -> bool:
        return self.kind == SYMBOL_REF and self.detail[0].isupper()


@dataclass(frozen=True, eq=False)
class GrammarTree:
    root: GtNode
    rule_index: dict[str, GtNode]
    by_id: dict[int, GtNode]
    source: str  # the grammar text; node spans index into it
    origin: str = "<grammar>"  # where the text came from, for diagnostics


def descendants(node: GtNode) -> list[GtNode]:
    """Pre-order traversal of the subtree rooted at node, excluding node."""
    out: list[GtNode] = []
    stack = list(reversed(node.children))
    while stack:
        n = stack.pop()
        out.append(n)
        stack.extend(reversed(n.children))
    return out


def iter_nodes(tree: GrammarTree):
    """Pre-order traversal including the root."""
    yield tree.root
    yield from descendants(tree.root)


def literal_texts(tree: GrammarTree) -> list[str]:
    """All distinct literal texts, in first-appearance order."""
    seen: dict[str, None] = {}
    for n in iter_nodes(tree):
        if n.kind == LITERAL:
            seen.setdefault(n.detail)
    return list(seen)


# -- parsing -----------------------------------------------------------------

class _Raw:
    """Mutable node used during parsing, frozen into GtNode afterwards."""

    __slots__ = ("kind", "detail", "children", "span")

    def __init__(self, kind, detail, children, span):
        self.kind = kind
        self.detail = detail
        self.children = children
        self.span = span


def parse_grammar(text: str, source: str = "<grammar>") -> GrammarTree:
    cur = Cursor(text, source)
    rules: list[_Raw] = []
    names: dict[str, int] = {}
    while not cur.eof():
        start = cur.pos
        name = cur.expect_name("rule name")
        if name in names:
            cur.error(f"duplicate rule '{name}'", start)
        names[name] = start
        if name[0].isupper():
            cur.error(f"terminal name '{name}' cannot be defined as a rule", start)
        prods: list[_Raw] = []
        cur.expect(":", f"rule '{name}'")
        prods.append(_parse_production(cur))
        while cur.accept(":"):
            prods.append(_parse_production(cur))
        cur.expect(";", f"rule '{name}'")
        rules.append(_Raw(SYMBOL_DEF, name, prods, (start, cur.pos)))
    root = _Raw(GRAMMAR, None, rules, (0, len(text)))
    _check_references(cur, root, names)
    return _freeze_tree(root, text, source)


def _parse_production(cur: Cursor) -> _Raw:
    body = _parse_alternative(cur)
    children = body.children if body.kind == SEQUENCE else [body]
    return _Raw(PRODUCTION, None, children, body.span)


def _parse_alternative(cur: Cursor) -> _Raw:
    first = _parse_sequence(cur)
    members = [first]
    while cur.accept("|"):
        members.append(_parse_sequence(cur))
    if len(members) == 1:
        return first
    return _Raw(ALTERNATIVE, None, members, (first.span[0], members[-1].span[1]))


def _parse_sequence(cur: Cursor) -> _Raw:
    items = [_parse_item(cur)]
    while _at_atom(cur):
        items.append(_parse_item(cur))
    if len(items) == 1:
        return items[0]
    return _Raw(SEQUENCE, None, items, (items[0].span[0], items[-1].span[1]))


def _at_atom(cur: Cursor) -> bool:
    c = cur.peek_char()
    if not c:
        return False
    return c.isalpha() or c in "_'(" or (c == "#" and cur.text.startswith("#empty", cur.pos))


def _parse_item(cur: Cursor) -> _Raw:
    atom = _parse_atom(cur)
    cur.skip_ws()
    c = cur.text[cur.pos] if cur.pos < len(cur.text) else ""
    if c in _SUFFIX_KIND:
        cur.pos += 1
        return _Raw(ITERATION, _SUFFIX_KIND[c], [atom], (atom.span[0], cur.pos))
    return atom


def _parse_atom(cur: Cursor) -> _Raw:
    cur.skip_ws()
    start = cur.pos
    if cur.accept("("):
        inner = _parse_alternative(cur)
        cur.expect(")")
        inner.span = (start, cur.pos)
        return inner
    if cur.accept_word("#empty"):
        return _Raw(EMPTY, None, [], (start, cur.pos))
    text = cur.accept_string()
    if text is not None:
        if text == "":
            cur.error("empty literal", start)
        return _Raw(LITERAL, text, [], (start, cur.pos))
    name = cur.accept_name()
    if name is not None:
        return _Raw(SYMBOL_REF, name, [], (start, cur.pos))
    cur.error("expected a symbol, literal, '#empty', or '('")


def _check_references(cur: Cursor, root: _Raw, names: dict[str, int]) -> None:
    def walk(n: _Raw):
        if n.kind == SYMBOL_REF and not n.detail[0].isupper() and n.detail not in names:
            cur.error(f"reference to undefined rule '{n.detail}'", n.span[0])
        for c in n.children:
            walk(c)

    walk(root)


def _freeze_tree(root: _Raw, source: str, origin: str = "<grammar>") -> GrammarTree:
    order: dict[int, int] = {}
    stack = [root]
    while stack:  # pre-order id assignment
        n = stack.pop()
        order[id(n)] = len(order)
        stack.extend(reversed(n.children))

    by_id: dict[int, GtNode] = {}

    def freeze(n: _Raw) -> GtNode:
        children = tuple(freeze(c) for c in n.children)
        key = (n.kind, n.detail, tuple(c.structure_key for c in children))
        node = GtNode(order[id(n)], n.kind, n.detail, children, tuple(n.span), key)
        by_id[node.id] = node
        return node

    froot = freeze(root)
    index = {sd.detail: sd for sd in froot.children}
    return GrammarTree(froot, index, by_id, source, origin)


# -- serialization -----------------------------------------------------------

def serialize_grammar(tree: GrammarTree) -> str:
    """Render the tree back to notation text.

    parse_grammar(serialize_grammar(t)) is structurally equal to t; the
    layout is one line per single-production rule and one ':' line per
    production otherwise.
    """
    lines = []
    for sd in tree.root.children:
        bodies = [_serialize_production(p) for p in sd.children]
        if len(bodies) == 1:
            lines.append(f"{sd.detail} : {bodies[0]} ;")
        else:
            lines.append(sd.detail + "".join(f"\n    : {b}" for b in bodies) + " ;")
    return "\n".join(lines) + ("\n" if lines else "")


def _serialize_production(prod: GtNode) -> str:
    return " ".join(_serialize_node(c, wrap=(ALTERNATIVE, SEQUENCE) if len(prod.children) > 1 else ())
                    for c in prod.children)


def _serialize_node(n: GtNode, wrap: tuple = ()) -> str:
    """Render one node; wrap lists the kinds that need parentheses here."""
    if n.kind == SYMBOL_REF:
        body = n.detail
    elif n.kind == LITERAL:
        body = escape_string(n.detail)
    elif n.kind == EMPTY:
        body = "#empty"
    elif n.kind == ITERATION:
        suffix = {STAR: "*", PLUS: "+", OPT: "?"}[n.detail]
        inner = (ALTERNATIVE, SEQUENCE, ITERATION)
        body = _serialize_node(n.children[0], wrap=inner) + suffix
    elif n.kind == SEQUENCE:
        body = " ".join(_serialize_node(c, wrap=(ALTERNATIVE, SEQUENCE)) for c in n.children)
    elif n.kind == ALTERNATIVE:
        body = " | ".join(_serialize_node(c, wrap=(ALTERNATIVE,)) for c in n.children)
    else:
        raise NotationError(f"cannot serialize node kind '{n.kind}'")
    if n.kind in wrap:
        body = "(" + body + ")"
    return body
