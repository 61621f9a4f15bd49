"""Chart parser that interprets a grammar tree over a token stream.

The grammar tree is compiled into an internal form: every symbol
definition, alternative, group, and iteration becomes a small set of
productions that remember which grammar-tree node they came from.  An
Earley recognizer runs over the tokens, then one parse tree is extracted
deterministically: earlier productions and earlier alternative branches
are preferred, and nonterminal spans are tried shortest-first.

The resulting tree mirrors the grammar's own shape.  Rule applications
carry the defined symbol's node id and production index; alternatives,
groups, and iterations appear as structural nodes; every leaf records
the literal or symbol-reference node it instantiates.  That provenance
is what lets the backends look up woven annotations per token.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from . import grammar as g
from .errors import NotationError, ParseError
from .lexer import Token


@dataclass(frozen=True)
class ParseLeaf:
    gt_id: int  # the Literal or SymbolRef node this token instantiates
    token: Token


@dataclass
class ParseNode:
    """One derivation step; kind is rule, ref, alt, seq, iter, or empty."""

    kind: str
    gt_id: int
    children: list
    production_index: Optional[int] = None
    production_id: Optional[int] = None


@dataclass
class ParseTree:
    root: ParseNode
    grammar: g.GrammarTree
    tokens: List[Token]


def leaves(tree: ParseTree) -> List[ParseLeaf]:
    out: List[ParseLeaf] = []

    def walk(node):
        if isinstance(node, ParseLeaf):
            out.append(node)
            return
        for c in node.children:
            walk(c)

    walk(tree.root)
    return out


def token_contexts(tree: ParseTree) -> List[Tuple[ParseLeaf, list]]:
    """For each leaf in order: (leaf, chain of (gt_id, lo, hi)).

    The chain lists every enclosing derivation step from outermost to the
    leaf itself, with the half-open token-index range each one derived.
    Rule applications contribute two links: the defined symbol and the
    chosen production.
    """
    ranges: Dict[int, Tuple[int, int]] = {}
    counter = [0]

    def measure(node) -> Tuple[int, int]:
        if isinstance(node, ParseLeaf):
            lo = counter[0]
            counter[0] += 1
        else:
            lo = hi = counter[0]
            for c in node.children:
                _, hi = measure(c)
        ranges[id(node)] = span = (lo, counter[0])
        return span

    measure(tree.root)
    out: list = []
    chain: list = []

    def collect(node):
        lo, hi = ranges[id(node)]
        if isinstance(node, ParseLeaf):
            out.append((node, chain + [(node.gt_id, lo, hi)]))
            return
        gt_ids = [node.gt_id]
        if node.kind == "rule":
            gt_ids.append(node.production_id)
        for gid in gt_ids:
            chain.append((gid, lo, hi))
        for c in node.children:
            collect(c)
        del chain[-len(gt_ids):]

    collect(tree.root)
    return out


# ---------------------------------------------------------------------------
# Compilation of the grammar tree into plain productions

# symbols: ("lit", text) | ("term", name) | ("nt", key)
# nonterminal keys: ("def"|"alt"|"seq"|"iter"|"emp", GT node id)


@dataclass(frozen=True)
class _Elem:
    sym: tuple
    gt_id: int


@dataclass(frozen=True)
class _Prod:
    pid: int
    lhs: tuple
    rhs: Tuple[_Elem, ...]
    tag: tuple


class _Compiled:
    def __init__(self):
        self.prods: List[_Prod] = []
        self.by_lhs: Dict[tuple, List[_Prod]] = {}
        self.nullable: set = set()

    def add(self, lhs, rhs, tag) -> _Prod:
        prod = _Prod(len(self.prods), lhs, tuple(rhs), tag)
        self.prods.append(prod)
        self.by_lhs.setdefault(lhs, []).append(prod)
        return prod


def _compile(tree: g.GrammarTree) -> _Compiled:
    cg = _Compiled()
    done = set()

    def item(node: g.GtNode) -> _Elem:
        if node.kind == g.LITERAL:
            return _Elem(("lit", node.detail), node.id)
        if node.kind == g.SYMBOL_REF:
            if node.is_terminal_ref():
                return _Elem(("term", node.detail), node.id)
            target = tree.rule_index[node.detail]
            return _Elem(("nt", ("def", target.id)), node.id)
        key = build(node)
        return _Elem(("nt", key), node.id)

    def build(node: g.GtNode) -> tuple:
        if node.kind == g.ALTERNATIVE:
            key = ("alt", node.id)
            if key not in done:
                done.add(key)
                for bi, branch in enumerate(node.children):
                    cg.add(key, [item(branch)], ("branch", node.id, bi))
        elif node.kind == g.SEQUENCE:
            key = ("seq", node.id)
            if key not in done:
                done.add(key)
                cg.add(key, [item(c) for c in node.children], ("group", node.id))
        elif node.kind == g.ITERATION:
            key = ("iter", node.id)
            if key not in done:
                done.add(key)
                sub = item(node.children[0])
                if node.detail == g.STAR:
                    cg.add(key, [], ("iter_empty", node.id))
                    cg.add(key, [_Elem(("nt", key), node.id), sub], ("iter_step", node.id))
                elif node.detail == g.PLUS:
                    cg.add(key, [sub], ("iter_one", node.id))
                    cg.add(key, [_Elem(("nt", key), node.id), sub], ("iter_step", node.id))
                else:  # OPT
                    cg.add(key, [], ("iter_empty", node.id))
                    cg.add(key, [sub], ("iter_one", node.id))
        elif node.kind == g.EMPTY:
            key = ("emp", node.id)
            if key not in done:
                done.add(key)
                cg.add(key, [], ("empty", node.id))
        else:
            raise AssertionError(f"unexpected item kind {node.kind}")
        return key

    for symdef in tree.root.children:
        key = ("def", symdef.id)
        done.add(key)
        for pi, prod in enumerate(symdef.children):
            cg.add(key, [item(c) for c in prod.children],
                   ("rule", symdef.id, pi, prod.id))

    # nullable nonterminals, to fixpoint
    changed = True
    while changed:
        changed = False
        for prod in cg.prods:
            if prod.lhs in cg.nullable:
                continue
            if all(e.sym[0] == "nt" and e.sym[1] in cg.nullable for e in prod.rhs):
                cg.nullable.add(prod.lhs)
                changed = True
    return cg


# ---------------------------------------------------------------------------
# Recognition


def _matches(sym: tuple, token: Token) -> bool:
    if sym[0] == "lit":
        return token.terminal is None and token.text == sym[1]
    return token.terminal == sym[1]


def _sym_display(sym: tuple) -> str:
    return f"'{sym[1]}'" if sym[0] == "lit" else sym[1]


def _recognize(cg: _Compiled, start_key: tuple, tokens: List[Token]):
    n = len(tokens)
    chart: List[dict] = [dict() for _ in range(n + 1)]
    completed: Dict[Tuple[int, int], set] = {}
    expected: List[set] = [set() for _ in range(n + 1)]

    def add(i: int, state: tuple):
        chart[i].setdefault(state, None)

    for prod in cg.by_lhs.get(start_key, ()):
        add(0, (prod.pid, 0, 0))
    for i in range(n + 1):
        queue = list(chart[i])
        qi = 0
        while qi < len(queue):
            pid, dot, origin = queue[qi]
            qi += 1
            prod = cg.prods[pid]
            if dot < len(prod.rhs):
                sym = prod.rhs[dot].sym
                if sym[0] == "nt":
                    for p in cg.by_lhs.get(sym[1], ()):
                        st = (p.pid, 0, i)
                        if st not in chart[i]:
                            add(i, st)
                            queue.append(st)
                    if sym[1] in cg.nullable:
                        st = (pid, dot + 1, origin)
                        if st not in chart[i]:
                            add(i, st)
                            queue.append(st)
                else:
                    expected[i].add(_sym_display(sym))
                    if i < n and _matches(sym, tokens[i]):
                        add(i + 1, (pid, dot + 1, origin))
            else:
                completed.setdefault((pid, origin), set()).add(i)
                for (pid2, dot2, origin2) in list(chart[origin]):
                    p2 = cg.prods[pid2]
                    if dot2 < len(p2.rhs) and p2.rhs[dot2].sym == ("nt", prod.lhs):
                        st = (pid2, dot2 + 1, origin2)
                        if st not in chart[i]:
                            add(i, st)
                            queue.append(st)
    return chart, completed, expected


# ---------------------------------------------------------------------------
# Deterministic extraction


@dataclass
class _DTree:
    prod: _Prod
    parts: list  # per rhs element: token index or nested _DTree


class _Extractor:
    def __init__(self, cg: _Compiled, completed, tokens):
        self.cg = cg
        self.completed = completed
        self.tokens = tokens
        self.memo: dict = {}
        self.active: set = set()
        self.guard_hits = 0

    def ends(self, key: tuple, start: int) -> List[int]:
        out = set()
        for prod in self.cg.by_lhs.get(key, ()):
            out |= self.completed.get((prod.pid, start), set())
        return sorted(out)

    def derive(self, key: tuple, lo: int, hi: int) -> Optional[_DTree]:
        memo_key = (key, lo, hi)
        if memo_key in self.memo:
            return self.memo[memo_key]
        if memo_key in self.active:
            # cyclic unit derivation; fail this path, try another shape
            self.guard_hits += 1
            return None
        self.active.add(memo_key)
        before = self.guard_hits
        result = None
        for prod in self.cg.by_lhs.get(key, ()):
            if hi not in self.completed.get((prod.pid, lo), ()):
                continue
            parts = self.split(prod.rhs, 0, lo, hi)
            if parts is not None:
                result = _DTree(prod, parts)
                break
        self.active.discard(memo_key)
        # a failure observed while a cycle guard fired anywhere below is
        # context-dependent and must not be cached
        if result is not None or self.guard_hits == before:
            self.memo[memo_key] = result
        return result

    def split(self, rhs, k: int, pos: int, hi: int) -> Optional[list]:
        if k == len(rhs):
            return [] if pos == hi else None
        elem = rhs[k]
        if elem.sym[0] != "nt":
            if pos < hi and _matches(elem.sym, self.tokens[pos]):
                rest = self.split(rhs, k + 1, pos + 1, hi)
                if rest is not None:
                    return [pos] + rest
            return None
        for end in self.ends(elem.sym[1], pos):
            if end > hi:
                break
            sub = self.derive(elem.sym[1], pos, end)
            if sub is None:
                continue
            rest = self.split(rhs, k + 1, end, hi)
            if rest is not None:
                return [sub] + rest
        return None


def _to_parse_tree(dt: _DTree, tokens: List[Token]):
    tag = dt.prod.tag

    def elem_node(elem: _Elem, part):
        if elem.sym[0] != "nt":
            return ParseLeaf(elem.gt_id, tokens[part])
        sub = _to_parse_tree(part, tokens)
        if elem.sym[1][0] == "def":
            return ParseNode("ref", elem.gt_id, [sub])
        return sub

    parts = [elem_node(e, p) for e, p in zip(dt.prod.rhs, dt.parts)]
    if tag[0] == "rule":
        return ParseNode("rule", tag[1], parts,
                         production_index=tag[2], production_id=tag[3])
    if tag[0] == "branch":
        return ParseNode("alt", tag[1], parts)
    if tag[0] == "group":
        return ParseNode("seq", tag[1], parts)
    if tag[0] == "empty":
        return ParseNode("empty", tag[1], [])
    if tag[0] == "iter_step":
        node = parts[0]  # the recursive spine, already an iter node
        node.children.append(parts[1])
        return node
    # iter_empty / iter_one
    return ParseNode("iter", tag[1], parts)


def parse_input(tree: g.GrammarTree, start: str, tokens: List[Token]) -> ParseTree:
    """Parse tokens from the given start rule; raises ParseError on failure."""
    if start not in tree.rule_index:
        raise NotationError(f"start symbol '{start}' is not a defined rule",
                            tree.origin)
    cg = _compile(tree)
    start_key = ("def", tree.rule_index[start].id)
    chart, completed, expected = _recognize(cg, start_key, tokens)
    n = len(tokens)
    ok = any(n in completed.get((p.pid, 0), ())
             for p in cg.by_lhs.get(start_key, ()))
    if not ok:
        furthest = max(i for i in range(n + 1) if chart[i])
        if furthest < n:
            position = tokens[furthest].span[0]
            what = f"unexpected {tokens[furthest].display}"
        else:
            position = tokens[-1].span[1] if tokens else 0
            what = "unexpected end of input"
        raise ParseError(what, position, tuple(sorted(expected[furthest])))
    extractor = _Extractor(cg, completed, tokens)
    dt = None
    for prod in cg.by_lhs.get(start_key, ()):
        if n in completed.get((prod.pid, 0), ()):
            parts = extractor.split(prod.rhs, 0, 0, n)
            if parts is not None:
                dt = _DTree(prod, parts)
                break
    if dt is None:
        raise ParseError("ambiguity extraction failed", 0, ())
    root = _to_parse_tree(dt, tokens)
    return ParseTree(root, tree, tokens)
