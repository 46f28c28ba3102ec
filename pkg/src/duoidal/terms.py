"""Morphism terms and the ``.duo`` file format.

A ``.duo`` file holds ``type`` lines, ``gen NAME : E -> E`` lines and
``term NAME [: E -> E] = TERM`` lines; ``#`` starts a comment. Terms are
built from generator names, ``id[E]``, ``str[E -> E]`` and parentheses with
``;`` (composition, read left to right), ``>`` and ``*``, binding in that
order from loosest to tightest.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from . import diagram as D
from .errors import BoundaryMismatch, DuoidalError, ParseError, UnknownType
from .expr import Expression, list_type, parse, to_text
from .signature import Signature, parse_signature_lines, signature_from_json, validate_signature

__all__ = [
    "Gen", "Id", "Str", "Comp", "ParT", "SeqT", "Term",
    "parse_term", "elaborate", "TermDef", "DuoFile", "parse_file", "parse_json", "load",
]


@dataclass(frozen=True)
class Gen:
    name: str


@dataclass(frozen=True)
class Id:
    expr: Expression


@dataclass(frozen=True)
class Str:
    source: Expression
    target: Expression


@dataclass(frozen=True)
class Comp:
    first: "Term"
    second: "Term"


@dataclass(frozen=True)
class ParT:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class SeqT:
    left: "Term"
    right: "Term"


Term = Union[Gen, Id, Str, Comp, ParT, SeqT]

_TOKEN = re.compile(r"\s*(?:(id|str)\s*\[([^\]]*)\]|([A-Za-z][A-Za-z0-9_]*)|(.))")


def _tokenize(text):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m.group(0).strip():
            break
        if m.group(1):
            out.append((m.group(1), m.group(2), m.start(1)))
        elif m.group(3):
            out.append(("name", m.group(3), m.start(3)))
        elif m.group(4) in "();>*":
            out.append((m.group(4), m.group(4), m.start(4)))
        else:
            raise ParseError(f"unexpected character {m.group(4)!r}", pos=m.start(4))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0]

    def binary(self, op, below, make):
        t = below()
        while self.peek() == op:
            self.i += 1
            t = make(t, below())
        return t

    def comp(self):
        return self.binary(";", self.seq, Comp)

    def seq(self):
        return self.binary(">", self.par, SeqT)

    def par(self):
        return self.binary("*", self.atom, ParT)

    def atom(self):
        kind, text, pos = self.toks[self.i]
        self.i += 1
        if kind == "(":
            t = self.comp()
            if self.peek() != ")":
                raise ParseError("expected ')'", pos=self.toks[self.i][2])
            self.i += 1
            return t
        if kind == "name":
            return Gen(text)
        try:
            if kind == "id":
                return Id(parse(text))
            if kind == "str":
                src, arrow, tgt = text.partition("->")
                if not arrow:
                    raise ParseError("expected 'str[E -> E]'", pos=pos)
                return Str(parse(src), parse(tgt))
        except ParseError as e:
            raise ParseError(f"in {kind}[...]: {e.message}", pos=pos) from None
        found = "end of input" if kind == "eof" else repr(text)
        raise ParseError(f"expected a term, found {found}", pos=pos)


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.comp()
    if p.peek() != "eof":
        raise ParseError(f"unexpected {p.toks[p.i][1]!r}", pos=p.toks[p.i][2])
    return t


def _check_types(sig: Signature, e: Expression):
    for t in list_type(e):
        if t not in sig.types:
            raise UnknownType(t)


def elaborate(sig: Signature, t: Term) -> D.StringDiagram:
    """Build the string diagram denoted by a term."""
    if isinstance(t, Gen):
        return D.from_generator(sig, t.name)
    if isinstance(t, Id):
        _check_types(sig, t.expr)
        return D.identity(t.expr, sig)
    if isinstance(t, Str):
        _check_types(sig, t.source)
        _check_types(sig, t.target)
        return D.structure_diagram(t.source, t.target, sig)
    a = elaborate(sig, t.first if isinstance(t, Comp) else t.left)
    b = elaborate(sig, t.second if isinstance(t, Comp) else t.right)
    if isinstance(t, Comp):
        try:
            return D.compose(a, b)
        except BoundaryMismatch:
            raise BoundaryMismatch(
                f"cannot compose: left side ends in {to_text(a.target)}, "
                f"right side starts at {to_text(b.source)}"
            ) from None
    return D.tensor(a, b) if isinstance(t, ParT) else D.sequence(a, b)


@dataclass
class TermDef:
    name: str
    line: int
    term: Term
    declared: tuple = None  # (source, target) if given


@dataclass
class DuoFile:
    path: str
    signature: Signature
    terms: dict = field(default_factory=dict)
    diagrams: dict = field(default_factory=dict)  # ready-made diagrams from JSON

    def names(self) -> list:
        return list(self.terms) + list(self.diagrams)

    def __contains__(self, name):
        return name in self.terms or name in self.diagrams

    def diagram(self, name: str) -> D.StringDiagram:
        """Elaborate a term and check it against its declared type."""
        if name in self.diagrams:
            return self.diagrams[name]
        td = self.terms[name]
        try:
            d = elaborate(self.signature, td.term)
            if td.declared is not None and (d.source, d.target) != td.declared:
                raise BoundaryMismatch(
                    f"term {name} has type {to_text(d.source)} -> {to_text(d.target)}, declared "
                    f"{to_text(td.declared[0])} -> {to_text(td.declared[1])}"
                )
        except DuoidalError as e:
            e.line = td.line
            raise
        return d


_TERM_LINE = re.compile(r"term\s+([A-Za-z][A-Za-z0-9_]*)\s*(?::(.*?))?=(.*)$")


def parse_file(text: str, path: str = "<string>") -> DuoFile:
    lines = list(enumerate(text.splitlines(), start=1))
    sig = parse_signature_lines(lines)
    validate_signature(sig)
    out = DuoFile(path, sig)
    for lineno, raw in lines:
        line = raw.split("#", 1)[0].strip()
        head = line.split(None, 1)[0] if line else ""
        if head in ("", "type", "gen"):
            continue
        if head != "term":
            raise ParseError(f"unknown declaration {head!r}", line=lineno)
        m = _TERM_LINE.match(line)
        if not m:
            raise ParseError("expected 'term NAME [: E -> E] = TERM'", line=lineno)
        name, typ, body = m.group(1), m.group(2), m.group(3)
        if name in out.terms:
            raise ParseError(f"term {name!r} defined twice", line=lineno)
        declared = None
        try:
            if typ is not None:
                src, arrow, tgt = typ.partition("->")
                if not arrow:
                    raise ParseError("expected ': E -> E'")
                declared = (parse(src), parse(tgt))
            term = parse_term(body)
        except ParseError as e:
            raise ParseError(e.message, pos=e.pos, line=lineno) from None
        out.terms[name] = TermDef(name, lineno, term, declared)
    return out


def parse_json(text: str, path: str = "<string>") -> DuoFile:
    """A JSON document with a ``signature`` and named ``diagrams`` in the serialized form."""
    data = json.loads(text)
    sig = signature_from_json(data.get("signature", {}))
    out = DuoFile(path, sig)
    for name, dj in data.get("diagrams", {}).items():
        out.diagrams[name] = D.from_json(dj, sig)
    return out


def load(path) -> DuoFile:
    """Read a ``.duo`` file, or a ``.json`` file of serialized diagrams."""
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        return parse_json(text, str(path))
    return parse_file(text, str(path))
