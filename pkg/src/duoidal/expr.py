"""Reduced duoidal expressions: the objects of the free physical duoidal category.

An expression is the unit ``N``, an atom, a sequencing ``E1 > ... > En`` or a
tensoring ``E1 * ... * En``. Expressions are kept reduced: a ``Seq`` never has
a unit or ``Seq`` child and a ``Par`` never has a unit or ``Par`` child, so
strict associativity and unitality hold on the nose.

Atoms normally carry a type name. Internally the package also builds *tagged*
expressions whose atoms carry element identifiers (integers); ``map_types``
turns those back into typed expressions.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Hashable, Iterable, Mapping, Union

from .errors import ParseError

__all__ = [
    "Expression", "Unit", "Atom", "Seq", "Par", "N",
    "seq_e", "par_e", "seq_all", "par_all",
    "parse", "to_text", "sym_equal", "canonical_key",
    "list_type", "map_types", "size",
]

IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Unit:
    def __repr__(self):
        return "N"

    def __str__(self):
        return "N"


@dataclass(frozen=True)
class Atom:
    name: Hashable

    def __repr__(self):
        return f"Atom({self.name!r})"

    def __str__(self):
        return str(self.name)


@dataclass(frozen=True)
class Seq:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) < 2:
            raise ValueError("Seq needs at least two children")
        for c in self.children:
            if isinstance(c, (Unit, Seq)):
                raise ValueError(f"Seq child must not be a unit or a Seq: {c!r}")

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Par:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) < 2:
            raise ValueError("Par needs at least two children")
        for c in self.children:
            if isinstance(c, (Unit, Par)):
                raise ValueError(f"Par child must not be a unit or a Par: {c!r}")

    def __str__(self):
        return to_text(self)


Expression = Union[Unit, Atom, Seq, Par]
N = Unit()


def _parts(e, kind):
    if isinstance(e, Unit):
        return ()
    if isinstance(e, kind):
        return e.children
    return (e,)


def _build(kind, parts):
    parts = tuple(parts)
    if not parts:
        return N
    if len(parts) == 1:
        return parts[0]
    return kind(parts)


def seq_e(e1: Expression, e2: Expression) -> Expression:
    """Sequence two expressions, dropping units and flattening nested ``Seq``."""
    return _build(Seq, _parts(e1, Seq) + _parts(e2, Seq))


def par_e(e1: Expression, e2: Expression) -> Expression:
    """Tensor two expressions, dropping units and flattening nested ``Par``."""
    return _build(Par, _parts(e1, Par) + _parts(e2, Par))


def seq_all(es: Iterable[Expression]) -> Expression:
    return reduce(seq_e, es, N)


def par_all(es: Iterable[Expression]) -> Expression:
    return reduce(par_e, es, N)


def size(e: Expression) -> int:
    return len(list_type(e))


def list_type(e: Expression) -> list:
    """Leaves of ``e`` read from left to right."""
    if isinstance(e, Unit):
        return []
    if isinstance(e, Atom):
        return [e.name]
    out = []
    for c in e.children:
        out.extend(list_type(c))
    return out


def map_types(f: Union[Callable, Mapping], e: Expression) -> Expression:
    """Relabel every atom of ``e``; a mapping leaves unmapped names alone."""
    if isinstance(f, Mapping):
        table = f
        f = lambda name: table.get(name, name)  # noqa: E731
    if isinstance(e, Unit):
        return e
    if isinstance(e, Atom):
        return Atom(f(e.name))
    return type(e)(tuple(map_types(f, c) for c in e.children))


def canonical_key(e: Expression) -> str:
    """A string that is equal for two expressions iff they are equal up to symmetry."""
    if isinstance(e, Unit):
        return "N"
    if isinstance(e, Atom):
        return repr(e.name)
    keys = [canonical_key(c) for c in e.children]
    if isinstance(e, Par):
        keys.sort()
        return "(" + "*".join(keys) + ")"
    return "(" + ">".join(keys) + ")"


def sym_equal(e1: Expression, e2: Expression) -> bool:
    """Equality up to permutation of tensored components."""
    return canonical_key(e1) == canonical_key(e2)


def to_text(e: Expression) -> str:
    """Print ``e`` in the ASCII syntax; compound children are parenthesized."""
    if isinstance(e, Unit):
        return "N"
    if isinstance(e, Atom):
        return str(e.name)
    op = " > " if isinstance(e, Seq) else " * "
    parts = []
    for c in e.children:
        s = to_text(c)
        if isinstance(c, (Seq, Par)):
            s = f"({s})"
        parts.append(s)
    return op.join(parts)


# -- parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:([A-Za-z][A-Za-z0-9_]*)|(.))")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m.group(0).strip() == "":
            break
        start = m.start(1) if m.group(1) else m.start(2)
        if m.group(1):
            tokens.append(("ident", m.group(1), start))
        elif m.group(2) in "()>*":
            tokens.append((m.group(2), m.group(2), start))
        else:
            raise ParseError(f"unexpected character {m.group(2)!r}", pos=start)
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind):
        tok = self.peek()
        if tok[0] != kind:
            found = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise ParseError(f"expected {kind!r}, found {found}", pos=tok[2])
        self.i += 1
        return tok

    def expr(self):
        e = self.par()
        while self.peek()[0] == ">":
            self.i += 1
            e = seq_e(e, self.par())
        return e

    def par(self):
        e = self.atom()
        while self.peek()[0] == "*":
            self.i += 1
            e = par_e(e, self.atom())
        return e

    def atom(self):
        tok = self.peek()
        if tok[0] == "(":
            self.i += 1
            e = self.expr()
            self.take(")")
            return e
        if tok[0] == "ident":
            self.i += 1
            return N if tok[1] == "N" else Atom(tok[1])
        found = "end of input" if tok[0] == "eof" else repr(tok[1])
        raise ParseError(f"expected an expression, found {found}", pos=tok[2])


def parse(text: str) -> Expression:
    """Parse ``N | IDENT | E > E | E * E | (E)``; ``>`` binds looser than ``*``."""
    if not text.strip():
        raise ParseError("empty expression", pos=0)
    p = _Parser(text)
    e = p.expr()
    p.take("eof")
    return e
