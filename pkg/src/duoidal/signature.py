"""Physical duoidal signatures and their homomorphisms."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import DuplicateGenerator, ParseError, TypeMismatch, UnknownGenerator, UnknownType
from .expr import Expression, list_type, map_types, parse

__all__ = [
    "Signature", "SignatureHom", "validate_signature", "validate_hom",
    "identity_hom", "compose_homs", "parse_signature_lines",
    "signature_to_json", "signature_from_json",
]


@dataclass(frozen=True)
class Signature:
    """Basic types plus named generators typed by source and target expressions."""

    types: frozenset = frozenset()
    generators: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "types", frozenset(self.types))
        object.__setattr__(self, "generators", dict(self.generators))

    def __hash__(self):
        return hash((self.types, tuple(sorted((k, str(s), str(t)) for k, (s, t) in self.generators.items()))))

    def source(self, g: str) -> Expression:
        return self[g][0]

    def target(self, g: str) -> Expression:
        return self[g][1]

    def __getitem__(self, g):
        try:
            return self.generators[g]
        except KeyError:
            raise UnknownGenerator(f"unknown generator {g!r}") from None

    def __contains__(self, g):
        return g in self.generators

    def with_generator(self, name, source, target) -> "Signature":
        if name in self.generators:
            raise DuplicateGenerator(f"generator {name!r} declared twice")
        gens = dict(self.generators)
        gens[name] = (source, target)
        return Signature(self.types, gens)

    def with_types(self, *names) -> "Signature":
        return Signature(self.types | set(names), self.generators)


def validate_signature(s: Signature) -> None:
    for name, (src, tgt) in s.generators.items():
        for t in list_type(src) + list_type(tgt):
            if t not in s.types:
                raise UnknownType(t, name)


@dataclass(frozen=True)
class SignatureHom:
    source: Signature
    target: Signature
    type_map: Mapping
    gen_map: Mapping

    def map_type(self, t):
        return self.type_map[t]

    def map_expr(self, e: Expression) -> Expression:
        return map_types(self.type_map.__getitem__, e)


def validate_hom(h: SignatureHom) -> None:
    for t in h.source.types:
        if t not in h.type_map or h.type_map[t] not in h.target.types:
            raise UnknownType(t)
    for g, (src, tgt) in h.source.generators.items():
        if g not in h.gen_map:
            raise TypeMismatch(f"generator {g!r} is not mapped", generator=g)
        g2 = h.gen_map[g]
        src2, tgt2 = h.target[g2]
        if h.map_expr(src) != src2 or h.map_expr(tgt) != tgt2:
            raise TypeMismatch(
                f"{g!r} : {src} -> {tgt} maps to {g2!r} : {src2} -> {tgt2}", generator=g
            )


def identity_hom(s: Signature) -> SignatureHom:
    return SignatureHom(s, s, {t: t for t in s.types}, {g: g for g in s.generators})


def compose_homs(h1: SignatureHom, h2: SignatureHom) -> SignatureHom:
    """``h1`` followed by ``h2``."""
    return SignatureHom(
        h1.source,
        h2.target,
        {t: h2.type_map[u] for t, u in h1.type_map.items()},
        {g: h2.gen_map[k] for g, k in h1.gen_map.items()},
    )


def parse_signature_lines(lines, sig: Signature = None) -> Signature:
    """Read ``type A B ...`` and ``gen f : E -> E`` lines; other lines are ignored."""
    sig = sig or Signature()
    for lineno, raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "type":
            names = rest.split()
            for t in names:
                if t == "N" or not t.isidentifier():
                    raise ParseError(f"bad type name {t!r}", line=lineno)
            sig = sig.with_types(*names)
        elif head == "gen":
            name, colon, body = rest.partition(":")
            name = name.strip()
            if not colon or not name.isidentifier():
                raise ParseError("expected 'gen NAME : E -> E'", line=lineno)
            src, arrow, tgt = body.partition("->")
            if not arrow:
                raise ParseError("expected '->' in generator type", line=lineno)
            try:
                sig = sig.with_generator(name, parse(src), parse(tgt))
            except ParseError as e:
                raise ParseError(e.message, pos=e.pos, line=lineno) from None
    return sig


def signature_to_json(s: Signature) -> dict:
    from .expr import to_text

    return {
        "types": sorted(s.types),
        "generators": {g: [to_text(a), to_text(b)] for g, (a, b) in sorted(s.generators.items())},
    }


def signature_from_json(data: Mapping) -> Signature:
    gens = {g: (parse(a), parse(b)) for g, (a, b) in data.get("generators", {}).items()}
    sig = Signature(frozenset(data.get("types", ())), gens)
    validate_signature(sig)
    return sig
