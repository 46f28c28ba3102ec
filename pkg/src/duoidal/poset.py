"""Finite typed posets and the constructions on them.

Elements of a ``TypedPoset`` are the integers ``0 .. n-1``; each carries a
label (normally a type name). The order is stored closed: ``leq`` holds every
pair ``(x, y)`` with ``x <= y``, reflexive pairs included.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable, NamedTuple, Optional, Sequence

from .errors import AntisymmetryViolation, ElementError, NotBracketed, NotInterval

__all__ = [
    "TypedPoset", "SubsetRef", "HOLE", "Primality", "PrimalityKind", "Extraction",
    "from_generators", "from_relation", "empty", "singleton", "seq", "tensor",
    "restrict", "components", "z_witness", "is_zetless", "has_span_or_cospan",
    "primality", "is_interval", "substitute", "is_bracketed", "extract",
    "saturate_for_interval", "canonical_form", "isomorphic", "close",
]


class _Hole:
    def __repr__(self):
        return "HOLE"

    def __reduce__(self):
        return "HOLE"


HOLE = _Hole()
"""Label of the element left behind by ``extract``."""


def close(n: int, pairs: Iterable[tuple]) -> list[int]:
    """Reflexive-transitive closure as ``up`` bitmasks: bit y of up[x] means x <= y."""
    up = [1 << i for i in range(n)]
    for x, y in pairs:
        up[x] |= 1 << y
    for k in range(n):
        bk = 1 << k
        uk = up[k]
        for i in range(n):
            if up[i] & bk:
                up[i] |= uk
    return up


@dataclass(frozen=True)
class TypedPoset:
    labels: tuple
    leq: frozenset

    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self):
        return len(self.labels)

    def le(self, x, y) -> bool:
        return (x, y) in self.leq

    def lt(self, x, y) -> bool:
        return x != y and (x, y) in self.leq

    def comparable(self, x, y) -> bool:
        return (x, y) in self.leq or (y, x) in self.leq

    def incomparable(self, x, y) -> bool:
        return not self.comparable(x, y)

    def above(self, x) -> set:
        return {y for y in range(self.n) if (x, y) in self.leq and y != x}

    def below(self, x) -> set:
        return {y for y in range(self.n) if (y, x) in self.leq and y != x}

    def strict_pairs(self) -> list:
        return sorted(p for p in self.leq if p[0] != p[1])

    def covers(self) -> list:
        """Hasse diagram edges."""
        out = []
        for x, y in self.strict_pairs():
            if not any(self.lt(x, z) and self.lt(z, y) for z in range(self.n)):
                out.append((x, y))
        return out

    def __repr__(self):
        rel = ", ".join(f"{x}<={y}" for x, y in self.covers())
        return f"TypedPoset({list(self.labels)}, {{{rel}}})"


def _check_range(n, xs):
    for x in xs:
        if not (isinstance(x, int) and 0 <= x < n):
            raise ElementError(f"element {x!r} out of range for a poset of size {n}")


def from_relation(labels: Sequence, pairs: Iterable[tuple], check: bool = True) -> TypedPoset:
    """Close ``pairs`` into a poset. With ``check`` an antisymmetry failure raises."""
    labels = tuple(labels)
    n = len(labels)
    pairs = list(pairs)
    for p in pairs:
        _check_range(n, p)
    up = close(n, pairs)
    leq = set()
    for x in range(n):
        m = up[x]
        for y in range(n):
            if m >> y & 1:
                if check and x != y and up[y] >> x & 1:
                    raise AntisymmetryViolation(f"elements {x} and {y} are identified by the relation")
                leq.add((x, y))
    return TypedPoset(labels, frozenset(leq))


def from_generators(n: int, labels: Sequence, edges: Iterable[tuple]) -> TypedPoset:
    """The poset generated by ``edges`` on elements ``0 .. n-1``."""
    if len(labels) != n:
        raise ValueError(f"expected {n} labels, got {len(labels)}")
    return from_relation(labels, edges)


def is_antisymmetric(p: TypedPoset) -> bool:
    return not any(x != y and (y, x) in p.leq for x, y in p.leq)


def empty() -> TypedPoset:
    return TypedPoset((), frozenset())


def singleton(label) -> TypedPoset:
    return TypedPoset((label,), frozenset({(0, 0)}))


def _shift(pairs, k):
    return {(x + k, y + k) for x, y in pairs}


def seq(p: TypedPoset, q: TypedPoset) -> TypedPoset:
    """Disjoint union with every element of ``p`` below every element of ``q``."""
    k = p.n
    leq = set(p.leq) | _shift(q.leq, k)
    leq |= {(x, k + y) for x in range(p.n) for y in range(q.n)}
    return TypedPoset(p.labels + q.labels, frozenset(leq))


def tensor(p: TypedPoset, q: TypedPoset) -> TypedPoset:
    """Disjoint union, no new relations."""
    return TypedPoset(p.labels + q.labels, frozenset(set(p.leq) | _shift(q.leq, p.n)))


def restrict(p: TypedPoset, members: Sequence[int]) -> TypedPoset:
    """Full subposet on ``members``, renumbered in the given order."""
    members = list(members)
    _check_range(p.n, members)
    idx = {m: i for i, m in enumerate(members)}
    leq = {(idx[x], idx[y]) for x, y in p.leq if x in idx and y in idx}
    return TypedPoset(tuple(p.labels[m] for m in members), frozenset(leq))


def _graph_components(n, adjacent, members=None):
    members = list(range(n)) if members is None else sorted(members)
    seen = set()
    comps = []
    for start in members:
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        seen.add(start)
        while stack:
            x = stack.pop()
            for y in members:
                if y not in seen and adjacent(x, y):
                    seen.add(y)
                    comp.add(y)
                    stack.append(y)
        comps.append(frozenset(comp))
    return comps


def connected_components(p: TypedPoset, members=None) -> list:
    return _graph_components(p.n, lambda x, y: p.comparable(x, y), members)


def incomparable_components(p: TypedPoset, members=None) -> list:
    return _graph_components(p.n, lambda x, y: p.incomparable(x, y), members)


def components(p: TypedPoset):
    """(connected components, incomparable-connected components), each sorted by least element."""
    return connected_components(p), incomparable_components(p)


def z_witness(p: TypedPoset) -> Optional[tuple]:
    """A 4-tuple ``(x, u, y, v)`` inducing exactly ``x<=u, y<=u, y<=v``, or None."""
    n = p.n
    lt = p.lt
    inc = p.incomparable
    for u in range(n):
        for x in range(n):
            if not lt(x, u):
                continue
            for y in range(n):
                if y == x or not lt(y, u) or not inc(x, y):
                    continue
                for v in range(n):
                    if v in (x, u, y) or not lt(y, v):
                        continue
                    if inc(x, v) and inc(u, v):
                        return (x, u, y, v)
    return None


def is_zetless(p: TypedPoset) -> bool:
    return z_witness(p) is None


def has_span_or_cospan(p: TypedPoset, x: int, y: int) -> bool:
    _check_range(p.n, (x, y))
    return any(
        (p.le(x, w) and p.le(y, w)) or (p.le(w, x) and p.le(w, y)) for w in range(p.n)
    )


class PrimalityKind(enum.Enum):
    EMPTY = "empty"
    SINGLETON = "singleton"
    PAR_PRIME = "par-prime"
    SEQ_PRIME = "seq-prime"


class Primality(NamedTuple):
    kind: PrimalityKind
    par_prime: bool
    seq_prime: bool
    ambiguous: bool = False


def primality(p: TypedPoset) -> Primality:
    """Classify ``p`` by tensor-primality (connected) and sequence-primality
    (incomparable connected).

    Only singletons are both; a poset with two or more elements that is both
    connected and incomparable connected contains a Z, and is reported as
    ``PAR_PRIME`` with ``ambiguous=True``.
    """
    if p.n == 0:
        return Primality(PrimalityKind.EMPTY, False, False)
    if p.n == 1:
        return Primality(PrimalityKind.SINGLETON, True, True)
    conn, inc = components(p)
    par_prime = len(conn) == 1
    seq_prime = len(inc) == 1
    if par_prime and seq_prime:
        return Primality(PrimalityKind.PAR_PRIME, True, True, ambiguous=True)
    kind = PrimalityKind.PAR_PRIME if par_prime else PrimalityKind.SEQ_PRIME
    return Primality(kind, par_prime, seq_prime)


@dataclass(frozen=True)
class SubsetRef:
    parent: TypedPoset
    members: frozenset

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        _check_range(self.parent.n, self.members)


def is_interval(s: SubsetRef) -> bool:
    p, S = s.parent, s.members
    for y in range(p.n):
        if y in S:
            continue
        if any(p.le(a, y) for a in S) and any(p.le(y, b) for b in S):
            return False
    return True


def is_bracketed(s: SubsetRef) -> bool:
    p, S = s.parent, s.members
    for q in range(p.n):
        if q in S:
            continue
        ups = [p.le(a, q) for a in S]
        downs = [p.le(q, a) for a in S]
        if any(ups) and not all(ups):
            return False
        if any(downs) and not all(downs):
            return False
    return True


def substitute(q: TypedPoset, x: int, p: TypedPoset) -> TypedPoset:
    """Replace element ``x`` of ``q`` by the poset ``p``.

    Result elements: those of ``q`` except ``x`` (in order), then those of ``p``.
    Every element of ``p`` inherits the relations ``x`` had to the rest of ``q``.
    """
    _check_range(q.n, (x,))
    rest = [r for r in range(q.n) if r != x]
    idx = {r: i for i, r in enumerate(rest)}
    k = len(rest)
    leq = {(idx[a], idx[b]) for a, b in q.leq if a != x and b != x}
    leq |= _shift(p.leq, k)
    for r in rest:
        if q.le(r, x):
            leq |= {(idx[r], k + e) for e in range(p.n)}
        if q.le(x, r):
            leq |= {(k + e, idx[r]) for e in range(p.n)}
    labels = tuple(q.labels[r] for r in rest) + p.labels
    return TypedPoset(labels, frozenset(leq))


class Extraction(NamedTuple):
    outer: TypedPoset
    hole: int
    inner: TypedPoset
    outer_elements: tuple  # parent element of each non-hole outer element
    inner_elements: tuple  # parent element of each inner element


def extract(s: SubsetRef) -> Extraction:
    """Factor ``parent`` as ``substitute(outer, hole, inner)`` along a bracketed subset.

    The hole is the last element of ``outer`` and is labelled ``HOLE``.
    """
    if not is_bracketed(s):
        raise NotBracketed(f"subset {sorted(s.members)} is not bracketed")
    p, S = s.parent, s.members
    rest = [r for r in range(p.n) if r not in S]
    inner_el = sorted(S)
    idx = {r: i for i, r in enumerate(rest)}
    h = len(rest)
    leq = {(idx[a], idx[b]) for a, b in p.leq if a in idx and b in idx}
    leq.add((h, h))
    for r in rest:
        if any(p.le(r, a) for a in S):
            leq.add((idx[r], h))
        if any(p.le(a, r) for a in S):
            leq.add((h, idx[r]))
    outer = TypedPoset(tuple(p.labels[r] for r in rest) + (HOLE,), frozenset(leq))
    return Extraction(outer, h, restrict(p, inner_el), tuple(rest), tuple(inner_el))


def saturate_for_interval(s: SubsetRef) -> TypedPoset:
    """Add order so that an interval becomes bracketed, identifying nothing."""
    if not is_interval(s):
        raise NotInterval(f"subset {sorted(s.members)} is not an interval")
    p, S = s.parent, s.members
    extra = []
    for u in range(p.n):
        if u in S:
            continue
        if any(p.le(u, a) for a in S):
            extra += [(u, a) for a in S]
        if any(p.le(a, u) for a in S):
            extra += [(a, u) for a in S]
    return from_relation(p.labels, list(p.leq) + extra)


def _label_key(label):
    return repr(label)


def canonical_form(p: TypedPoset) -> tuple:
    """Invariant under label-preserving isomorphism; equal forms mean isomorphic posets."""
    n = p.n
    inv = {x: (_label_key(p.labels[x]), len(p.below(x)), len(p.above(x))) for x in range(n)}
    classes = {}
    for x in range(n):
        classes.setdefault(inv[x], []).append(x)
    keys = sorted(classes)
    best = None
    for perms in itertools.product(*(itertools.permutations(classes[k]) for k in keys)):
        order = [x for block in perms for x in block]
        pos = {x: i for i, x in enumerate(order)}
        rel = tuple(sorted((pos[a], pos[b]) for a, b in p.leq if a != b))
        if best is None or rel < best:
            best = rel
    return (tuple(k for k in keys for _ in classes[k]), best or ())


def isomorphic(p: TypedPoset, q: TypedPoset) -> bool:
    if p.n != q.n or sorted(map(_label_key, p.labels)) != sorted(map(_label_key, q.labels)):
        return False
    if len(p.leq) != len(q.leq):
        return False
    return canonical_form(p) == canonical_form(q)
