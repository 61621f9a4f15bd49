"""Tokenizer driven by a grammar plus a small lexer sidecar file.

The grammar notation never defines what IDENTIFIER or INT look like, so
terminals get their shapes from a sidecar spec:

    # one terminal per line
    IDENTIFIER = /[A-Za-z_][A-Za-z0-9_]*/
    INT        = /[0-9]+/
    skip       = /[ \\t\\r\\n]+/

At each input position every grammar literal and every terminal regex is
a candidate; the longest match wins, with ties broken in favor of
literals (keywords beat IDENTIFIER) and then earlier spec entries.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .errors import LexError, NotationError
from .grammar import GrammarTree, literal_texts

_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*/(.*)/\s*(?:#.*)?$")


@dataclass(frozen=True)
class LexerSpec:
    terminals: Tuple[Tuple[str, str], ...]  # (name, regex text), in file order
    skip: Optional[str] = None


@dataclass(frozen=True)
class Token:
    text: str
    terminal: Optional[str]  # None for literal tokens
    span: Tuple[int, int]

    @property
    def display(self) -> str:
        return self.terminal if self.terminal else f"'{self.text}'"


def parse_lexer_spec(text: str, source: str = "<lexer>") -> LexerSpec:
    terminals = []
    skip = None
    seen = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        m = _LINE.match(line)
        if m is None:
            raise NotationError("expected 'NAME = /regex/'", source, lineno, 1)
        name, regex = m.group(1), m.group(2)
        try:
            re.compile(regex)
        except re.error as exc:
            raise NotationError(f"bad regex for {name}: {exc}", source, lineno, 1)
        if name == "skip":
            if skip is not None:
                raise NotationError("duplicate skip pattern", source, lineno, 1)
            skip = regex
            continue
        if not name[0].isupper():
            raise NotationError(f"terminal name '{name}' must start uppercase",
                                source, lineno, 1)
        if name in seen:
            raise NotationError(f"duplicate terminal '{name}'", source, lineno, 1)
        seen.add(name)
        terminals.append((name, regex))
    return LexerSpec(tuple(terminals), skip)


def tokenize(spec: LexerSpec, grammar: GrammarTree, text: str) -> List[Token]:
    literals = set(literal_texts(grammar))
    compiled = [(name, re.compile(rx)) for name, rx in spec.terminals]
    skip_re = re.compile(spec.skip) if spec.skip is not None else None
    tokens: List[Token] = []
    pos = 0
    while True:
        if skip_re is not None:
            while True:
                m = skip_re.match(text, pos)
                if m is None or m.end() == pos:
                    break
                pos = m.end()
        if pos >= len(text):
            return tokens
        # candidate ranking: length, then literal beats terminal, then file order
        best = None
        for lit in literals:
            if text.startswith(lit, pos):
                key = (len(lit), 1, 0)
                if best is None or key > best[0]:
                    best = (key, lit, None)
        for idx, (name, rx) in enumerate(compiled):
            m = rx.match(text, pos)
            if m is not None and m.end() > pos:
                key = (m.end() - pos, 0, -idx)
                if best is None or key > best[0]:
                    best = (key, text[pos:m.end()], name)
        if best is None:
            raise LexError(f"no token matches {text[pos:pos + 10]!r}", pos)
        (length, _, _), matched, terminal = best
        tokens.append(Token(matched, terminal, (pos, pos + length)))
        pos += length
