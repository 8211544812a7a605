"""Propositional formulas over negation, conjunction, and disjunction:
immutable AST, text grammar, parser, minimal-parenthesis printer, and
subformula closure.

Grammar (whitespace insignificant, both binary operators left-associative,
precedence ``!`` > ``&`` > ``|``)::

    or    := and ('|' and)*
    and   := unary ('&' unary)*
    unary := '!' unary | atom | '(' or ')'
    atom  := [A-Za-z_][A-Za-z0-9_]*

The unicode connectives ``¬ ∧ ∨`` are accepted as aliases of ``! & |``; the
renderer always emits ASCII.  Formula identity is syntactic: ``P & Q`` and
``Q & P`` are distinct formulas even though they denote the same lattice
element.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Union

_ATOM_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Atom:
    name: str

    def __post_init__(self):
        if not _ATOM_RE.fullmatch(self.name):
            raise ValueError(f"invalid atom name {self.name!r}")

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class Not:
    child: "Formula"

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return render(self)


Formula = Union[Atom, Not, And, Or]


class ParseError(ValueError):
    """Syntax error carrying the byte offset and the expected-token set."""

    def __init__(self, text: str, offset: int, expected: tuple[str, ...]):
        self.offset = offset
        self.expected = expected
        super().__init__(
            f"syntax error at offset {offset}: expected {' or '.join(expected)} "
            f"in {text!r}"
        )


_ALIASES = {"¬": "!", "∧": "&", "∨": "|"}


def _tokenize(text: str):
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
            continue
        c = _ALIASES.get(c, c)
        if c in "!&|()":
            tokens.append((c, i))
            i += 1
            continue
        m = _ATOM_RE.match(text, i)
        if m:
            tokens.append(("atom", i, m.group()))
            i = m.end()
            continue
        raise ParseError(text, i, ("'!'", "'&'", "'|'", "'('", "')'", "atom"))
    tokens.append(("end", len(text)))
    return tokens


def parse(text: str) -> Formula:
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos]

    def fail(*expected):
        raise ParseError(text, peek()[1], expected)

    def parse_or():
        nonlocal pos
        node = parse_and()
        while peek()[0] == "|":
            pos += 1
            node = Or(node, parse_and())
        return node

    def parse_and():
        nonlocal pos
        node = parse_unary()
        while peek()[0] == "&":
            pos += 1
            node = And(node, parse_unary())
        return node

    def parse_unary():
        nonlocal pos
        kind = peek()[0]
        if kind == "!":
            pos += 1
            return Not(parse_unary())
        if kind == "atom":
            tok = peek()
            pos += 1
            return Atom(tok[2])
        if kind == "(":
            pos += 1
            node = parse_or()
            if peek()[0] != ")":
                fail("')'")
            pos += 1
            return node
        fail("atom", "'!'", "'('")

    node = parse_or()
    if peek()[0] != "end":
        fail("end of input", "'&'", "'|'")
    return node


def _level(f: Formula) -> int:
    if isinstance(f, Or):
        return 1
    if isinstance(f, And):
        return 2
    if isinstance(f, Not):
        return 3
    return 4


def render(f: Formula) -> str:
    """Minimal-parenthesis text form such that parse(render(f)) == f."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        child = render(f.child)
        if _level(f.child) < 3:
            child = f"({child})"
        return f"!{child}"
    op, lvl = ("&", 2) if isinstance(f, And) else ("|", 1)
    left = render(f.left)
    if _level(f.left) < lvl:
        left = f"({left})"
    right = render(f.right)
    # same-level right child would re-associate under the left-associative grammar
    if _level(f.right) <= lvl:
        right = f"({right})"
    return f"{left} {op} {right}"


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Not):
        return (f.child,)
    if isinstance(f, (And, Or)):
        return (f.left, f.right)
    return ()


def subformula_closure(formulas: Iterable[Formula]) -> list[Formula]:
    """Deduplicated subformulas of every input, children before parents."""
    seen: dict[Formula, None] = {}

    def visit(f: Formula):
        if f in seen:
            return
        for c in children(f):
            visit(c)
        seen[f] = None

    for f in formulas:
        visit(f)
    return list(seen)


def atoms_of(f: Formula) -> set[str]:
    return {g.name for g in subformula_closure([f]) if isinstance(g, Atom)}
