"""Shared test helpers: independent oracles and random-case generators.

Everything here is deliberately written against the data model only, not
against the implementation under test: the recognizer oracle enumerates
the grammar's language instead of parsing, and the reference formatter
interprets whitespace programs with its own event loop.
"""

from __future__ import annotations

import random
from pathlib import Path

from gramweave import grammar as G
from gramweave.annotations import NameValue, SeqValue, StrValue
from gramweave.earley import token_contexts

FIXTURES = Path(__file__).parent / "fixtures"


def fixture(name: str) -> str:
    return FIXTURES.joinpath(name).read_text(encoding="utf-8")


# ---------------------------------------------------------------------------
# Recognition oracle: enumerate every sentence the grammar derives up to a
# length bound (Kleene fixpoint over rule languages), then test membership.


class LanguageTooLarge(Exception):
    pass


def _concat(left: set, right: set, max_len: int, cap: int) -> set:
    out = set()
    for a in left:
        for b in right:
            if len(a) + len(b) <= max_len:
                out.add(a + b)
                if len(out) > cap:
                    raise LanguageTooLarge
    return out


def _closure(base: set, max_len: int, cap: int) -> set:
    # all concatenations of zero or more sentences from base
    out = {()}
    frontier = {()}
    while frontier:
        step = _concat(frontier, base, max_len, cap)
        fresh = step - out
        out |= fresh
        if len(out) > cap:
            raise LanguageTooLarge
        frontier = fresh
    return out


def enumerate_language(tree: G.GrammarTree, start: str, max_len: int,
                       cap: int = 30000) -> set:
    """Set of all sentences (symbol tuples) of length <= max_len.

    Raises LanguageTooLarge when the bounded language exceeds cap; the
    caller should skip such cases rather than trust a truncated set.
    """
    lang = {name: set() for name in tree.rule_index}

    def eval_node(node: G.GtNode) -> set:
        k = node.kind
        if k == G.LITERAL:
            return {(("lit", node.detail),)}
        if k == G.SYMBOL_REF:
            if node.is_terminal_ref():
                return {(("term", node.detail),)}
            return set(lang[node.detail])
        if k == G.EMPTY:
            return {()}
        if k == G.ALTERNATIVE or k == G.SYMBOL_DEF:
            out = set()
            for child in node.children:
                out |= eval_node(child)
                if len(out) > cap:
                    raise LanguageTooLarge
            return out
        if k == G.PRODUCTION or k == G.SEQUENCE:
            out = {()}
            for child in node.children:
                out = _concat(out, eval_node(child), max_len, cap)
                if not out:
                    return out
            return out
        if k == G.ITERATION:
            inner = eval_node(node.children[0])
            if node.detail == G.OPT:
                return inner | {()}
            reps = _closure(inner, max_len, cap)
            if node.detail == G.PLUS:
                return _concat(inner, reps, max_len, cap)
            return reps
        raise AssertionError(f"unexpected node kind {k}")

    while True:
        changed = False
        for name, sd in tree.rule_index.items():
            fresh = eval_node(sd)
            if fresh - lang[name]:
                lang[name] |= fresh
                changed = True
            if len(lang[name]) > cap:
                raise LanguageTooLarge
        if not changed:
            return lang[start]


def token_shape(tokens) -> tuple:
    return tuple(("term", t.terminal) if t.terminal else ("lit", t.text)
                 for t in tokens)


def oracle_accepts(tree: G.GrammarTree, start: str, tokens) -> bool:
    sentences = enumerate_language(tree, start, max_len=len(tokens))
    return token_shape(tokens) in sentences


# ---------------------------------------------------------------------------
# Reference pretty-printer: flatten everything into an event list, then run
# a character loop with explicit line handling.


def _ref_program(value) -> list:
    if isinstance(value, StrValue):
        return [("text", value.text)]
    assert isinstance(value, SeqValue)
    out = []
    for item in value.items:
        if isinstance(item, StrValue):
            out.append(("text", item.text))
        else:
            assert isinstance(item, NameValue)
            out.append({"increaseIndent": ("inc",),
                        "decreaseIndent": ("dec",)}[item.name])
    return out


def _ref_attr(store, gid: int, name: str) -> list | None:
    for attr in store.annotation_for(gid).attributes:
        if attr.namespace is None and attr.name == name:
            return _ref_program(attr.value)
    return None


def reference_format(tree, store) -> str:
    ga = store.grammar_annotation
    default_before, default_after, unit = [], [], "    "
    if ga is not None:
        for attr in ga.attributes:
            if attr.name == "defaultBefore":
                default_before = _ref_program(attr.value)
            elif attr.name == "defaultAfter":
                default_after = _ref_program(attr.value)
            elif attr.name == "indentUnit":
                unit = attr.value.text
    events = []
    contexts = token_contexts(tree)
    for i, (leaf, chain) in enumerate(contexts):
        if i > 0:
            prev_chain = contexts[i - 1][1]
            after = []
            found = False
            for gid, _lo, hi in reversed(prev_chain):
                if hi == i:
                    prog = _ref_attr(store, gid, "after")
                    if prog is not None:
                        found = True
                        after.extend(prog)
            events.extend(after if found else default_after)
        before = []
        found = False
        for gid, lo, _hi in chain:
            if lo == i:
                prog = _ref_attr(store, gid, "before")
                if prog is not None:
                    found = True
                    before.extend(prog)
        events.extend(before if found else default_before)
        events.append(("tok", leaf.token.text))
    if contexts:
        last = len(contexts) - 1
        after = []
        found = False
        for gid, _lo, hi in reversed(contexts[last][1]):
            if hi == last + 1:
                prog = _ref_attr(store, gid, "after")
                if prog is not None:
                    found = True
                    after.extend(prog)
        events.extend(after if found else default_after)

    out = ""
    level = 0
    line_has_ink = False  # a non-whitespace character was written on this line
    for ev in events:
        if ev == ("inc",):
            level += 1
            continue
        if ev == ("dec",):
            level = max(0, level - 1)
            continue
        for ch in ev[1]:
            if ch == "\n":
                while out and out[-1] in " \t":
                    out = out[:-1]
                out += "\n"
                line_has_ink = False
            elif ch in " \t":
                out += ch
            else:
                if not line_has_ink:
                    out += unit * level
                    line_has_ink = True
                out += ch
    while out and out[-1] in " \t":
        out = out[:-1]
    if out.endswith("\n"):
        while out.endswith("\n") or out[-1:] in (" ", "\t"):
            out = out[:-1]
        out += "\n"
    return out


# ---------------------------------------------------------------------------
# Random grammars and patterns for the differential matcher tests.

_RULE_NAMES = ["alpha", "beta", "gamma", "delta"]
_TERMINALS = ["ID", "NUM", "STR"]
_LITERALS = ["x", "y", "+", "<", ";"]


def random_grammar_text(rng: random.Random) -> str:
    names = _RULE_NAMES[:rng.randint(1, 4)]

    def atom(depth: int) -> str:
        roll = rng.random()
        if depth < 2 and roll < 0.15:
            inner = " | ".join(seq(depth + 1) for _ in range(rng.randint(2, 3)))
            return f"({inner})"
        if roll < 0.35:
            return rng.choice(names)
        if roll < 0.6:
            return rng.choice(_TERMINALS)
        if roll < 0.9:
            text = rng.choice(_LITERALS)
            return f"'{text}'"
        return "#empty"

    def item(depth: int) -> str:
        a = atom(depth)
        if a != "#empty" and rng.random() < 0.3:
            return a + rng.choice("*+?")
        return a

    def seq(depth: int) -> str:
        return " ".join(item(depth) for _ in range(rng.randint(1, 3)))

    rules = []
    for name in names:
        prods = [seq(0) for _ in range(rng.randint(1, 3))]
        rules.append(f"{name} : " + " : ".join(prods) + " ;")
    return "\n".join(rules)


def random_grammar(rng: random.Random, max_nodes: int = 50) -> G.GrammarTree:
    while True:
        tree = G.parse_grammar(random_grammar_text(rng), "<random>")
        if len(tree.by_id) <= max_nodes:
            return tree


def random_rule_pattern_text(rng: random.Random) -> str:
    var_count = 0
    defined = []

    def fresh_var() -> str:
        nonlocal var_count
        var_count += 1
        return f"v{var_count}"

    def atom(depth: int) -> str:
        roll = rng.random()
        if roll < 0.12:
            return ".."
        if roll < 0.22:
            return "#lex"
        if roll < 0.3:
            return "#"
        if roll < 0.36:
            return "#empty"
        if depth < 2 and roll < 0.46:
            inner = " | ".join(seq(depth + 1) for _ in range(rng.randint(1, 2)))
            if rng.random() < 0.3:
                inner += " | ..."
            return f"({inner})"
        if roll < 0.6:
            return f"'{rng.choice(_LITERALS)}'"
        if roll < 0.8:
            return rng.choice(_TERMINALS)
        return rng.choice(_RULE_NAMES)

    def item(depth: int) -> str:
        prefix = ""
        roll = rng.random()
        if roll < 0.1 and defined:
            return "$" + rng.choice(defined)
        if roll < 0.25:
            var = fresh_var()
            defined.append(var)
            prefix = f"${var}="
        body = atom(depth)
        if body not in ("..", "#empty") and rng.random() < 0.3:
            body += rng.choice("*+?")
        return prefix + body

    def seq(depth: int) -> str:
        return " ".join(item(depth) for _ in range(rng.randint(1, 3)))

    symbol = rng.choice(["#"] * 2 + _RULE_NAMES)
    if rng.random() < 0.15:
        return f"{symbol} : {{...}}"
    prods = [seq(0) for _ in range(rng.randint(1, 2))]
    return f"{symbol} : " + " : ".join(prods)


def results_as_sets(results) -> set:
    out = set()
    for r in results:
        bindings = tuple(sorted((var, ids) for var, ids in r.bindings.items()))
        out.add((r.node, bindings))
    return out
