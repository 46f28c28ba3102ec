"""Zetless posets versus duoidal expressions.

``encode`` and ``decode`` translate between reduced expressions and zetless
posets; ``inclusion_exists`` searches for a bijective-on-objects inclusion and
``synthesize_structure_map`` turns such an inclusion into a formal composite of
distributors and symmetries.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from . import poset as P
from .errors import BoundaryMismatch, InvalidInclusion, NotZetless, SizeLimit, TypeMismatch
from .expr import (
    Atom, Expression, N, Par, Seq, Unit, canonical_key, list_type, map_types,
    par_all, par_e, seq_all, seq_e,
)
from .poset import TypedPoset

__all__ = [
    "encode", "decode", "decode_tagged", "tag", "Inclusion", "inclusion_exists",
    "compose_inclusions", "identity_inclusion", "StructureTerm", "Id", "Dist", "Sym",
    "SeqOf", "ParOf", "Compose", "synthesize_structure_map", "structure_term",
    "enumerate_zetless", "enumerate_expressions", "MAX_ENUMERATE", "structure_map",
]

MAX_ENUMERATE = 7


def encode(e: Expression) -> TypedPoset:
    """The zetless poset of ``e``; element ``k`` is the ``k``-th leaf of ``e``."""
    if isinstance(e, Unit):
        return P.empty()
    if isinstance(e, Atom):
        return P.singleton(e.name)
    parts = [encode(c) for c in e.children]
    op = P.seq if isinstance(e, Seq) else P.tensor
    return functools.reduce(op, parts)


def tag(e: Expression) -> Expression:
    """Replace the ``k``-th leaf of ``e`` by ``Atom(k)``."""
    counter = itertools.count()

    def go(x):
        if isinstance(x, Unit):
            return x
        if isinstance(x, Atom):
            return Atom(next(counter))
        return type(x)(tuple(go(c) for c in x.children))

    return go(e)


def _typed(labels, tagged):
    return map_types(lambda i: labels[i], tagged)


def decode_tagged(p: TypedPoset, members=None) -> Expression:
    """Decode ``p`` (or its full subposet on ``members``) to an expression
    whose atoms are element indices.

    Tensor components are ordered by the canonical key of their typed
    expression, ties by least element; sequence components by the poset.
    """
    members = frozenset(range(p.n)) if members is None else frozenset(members)
    if not members:
        return N
    if len(members) == 1:
        return Atom(next(iter(members)))
    conn = P.connected_components(p, members)
    if len(conn) > 1:
        kids = [decode_tagged(p, c) for c in conn]
        kids.sort(key=lambda t: (canonical_key(_typed(p.labels, t)), min(list_type(t))))
        return Par(tuple(kids))
    inc = P.incomparable_components(p, members)
    if len(inc) > 1:
        reps = {c: next(iter(c)) for c in inc}
        below = {c: sum(1 for d in inc if d != c and p.le(reps[d], reps[c])) for c in inc}
        return Seq(tuple(decode_tagged(p, c) for c in sorted(inc, key=below.get)))
    sub = sorted(members)
    w = P.z_witness(P.restrict(p, sub))
    witness = tuple(sub[i] for i in w) if w else None
    raise NotZetless(f"elements {sub} are both connected and incomparable connected", witness)


def decode(p: TypedPoset) -> Expression:
    """The canonical expression of a zetless poset."""
    return _typed(p.labels, decode_tagged(p))


# -- inclusions --------------------------------------------------------------

@dataclass(frozen=True)
class Inclusion:
    """A label- and order-preserving bijection ``source -> target``."""

    source: TypedPoset
    target: TypedPoset
    mapping: tuple

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple(self.mapping))
        s, t, m = self.source, self.target, self.mapping
        if s.n != t.n or len(m) != s.n or sorted(m) != list(range(t.n)):
            raise InvalidInclusion("mapping is not a bijection between the two posets")
        for x in range(s.n):
            if s.labels[x] != t.labels[m[x]]:
                raise InvalidInclusion(f"element {x} changes label {s.labels[x]!r} -> {t.labels[m[x]]!r}")
        for x, y in s.leq:
            if (m[x], m[y]) not in t.leq:
                raise InvalidInclusion(f"relation {x}<={y} is not preserved")


def identity_inclusion(p: TypedPoset) -> Inclusion:
    return Inclusion(p, p, tuple(range(p.n)))


def inclusion_exists(source: TypedPoset, target: TypedPoset) -> Optional[Inclusion]:
    """The lexicographically least inclusion ``source -> target``, or None."""
    if source.n != target.n:
        return None
    if sorted(map(repr, source.labels)) != sorted(map(repr, target.labels)):
        return None
    n = source.n
    assign = [None] * n
    used = [False] * n

    def ok(x, tx):
        for y in range(x):
            ty = assign[y]
            if source.le(x, y) and not target.le(tx, ty):
                return False
            if source.le(y, x) and not target.le(ty, tx):
                return False
        return True

    def go(x):
        if x == n:
            return True
        for tx in range(n):
            if used[tx] or target.labels[tx] != source.labels[x] or not ok(x, tx):
                continue
            assign[x] = tx
            used[tx] = True
            if go(x + 1):
                return True
            used[tx] = False
        return False

    if go(0):
        return Inclusion(source, target, tuple(assign))
    return None


def _isomorphism(p: TypedPoset, q: TypedPoset) -> Optional[tuple]:
    if p == q:
        return tuple(range(p.n))
    if len(p.leq) != len(q.leq):
        return None
    inc = inclusion_exists(p, q)
    return inc.mapping if inc else None


def compose_inclusions(i1: Inclusion, i2: Inclusion) -> Inclusion:
    """``i1`` followed by ``i2``; the middle posets must be isomorphic."""
    iso = _isomorphism(i1.target, i2.source)
    if iso is None:
        raise BoundaryMismatch("target of the first inclusion is not the source of the second")
    return Inclusion(i1.source, i2.target, tuple(i2.mapping[iso[i1.mapping[x]]] for x in range(i1.source.n)))


# -- structure terms ---------------------------------------------------------

class StructureTerm:
    """Formal composite of identities, distributors and symmetries."""

    source: Expression
    target: Expression

    def __str__(self):
        return self.show()


@dataclass(frozen=True)
class Id(StructureTerm):
    expr: Expression

    @property
    def source(self):
        return self.expr

    @property
    def target(self):
        return self.expr

    def show(self):
        return f"id[{self.expr}]"


@dataclass(frozen=True)
class Dist(StructureTerm):
    """(X > Z) * (Y > W) -> (X * Y) > (Z * W)."""

    x: Expression
    y: Expression
    z: Expression
    w: Expression

    @property
    def source(self):
        return par_e(seq_e(self.x, self.z), seq_e(self.y, self.w))

    @property
    def target(self):
        return seq_e(par_e(self.x, self.y), par_e(self.z, self.w))

    def show(self):
        return f"d[{self.x}, {self.y}, {self.z}, {self.w}]"


@dataclass(frozen=True)
class Sym(StructureTerm):
    """X * Y -> Y * X."""

    x: Expression
    y: Expression

    @property
    def source(self):
        return par_e(self.x, self.y)

    @property
    def target(self):
        return par_e(self.y, self.x)

    def show(self):
        return f"sym[{self.x}, {self.y}]"


@dataclass(frozen=True)
class SeqOf(StructureTerm):
    terms: tuple

    @property
    def source(self):
        return seq_all(t.source for t in self.terms)

    @property
    def target(self):
        return seq_all(t.target for t in self.terms)

    def show(self):
        return "(" + " > ".join(t.show() for t in self.terms) + ")"


@dataclass(frozen=True)
class ParOf(StructureTerm):
    terms: tuple

    @property
    def source(self):
        return par_all(t.source for t in self.terms)

    @property
    def target(self):
        return par_all(t.target for t in self.terms)

    def show(self):
        return "(" + " * ".join(t.show() for t in self.terms) + ")"


@dataclass(frozen=True)
class Compose(StructureTerm):
    terms: tuple

    def __post_init__(self):
        if not self.terms:
            raise ValueError("Compose needs at least one term")
        for a, b in zip(self.terms, self.terms[1:]):
            if a.target != b.source:
                raise TypeMismatch(f"cannot compose {a.target} with {b.source}")

    @property
    def source(self):
        return self.terms[0].source

    @property
    def target(self):
        return self.terms[-1].target

    def show(self):
        return "(" + " ; ".join(t.show() for t in self.terms) + ")"


def _is_id(t):
    if isinstance(t, Id):
        return True
    if isinstance(t, (SeqOf, ParOf, Compose)):
        return all(_is_id(s) for s in t.terms)
    return False


def _seq_of(ts):
    ts = [t for t in ts if not (isinstance(t, Id) and t.expr == N)]
    if all(_is_id(t) for t in ts):
        return Id(seq_all(t.source for t in ts))
    return ts[0] if len(ts) == 1 else SeqOf(tuple(ts))


def _par_of(ts):
    ts = [t for t in ts if not (isinstance(t, Id) and t.expr == N)]
    if all(_is_id(t) for t in ts):
        return Id(par_all(t.source for t in ts))
    return ts[0] if len(ts) == 1 else ParOf(tuple(ts))


def _compose(*ts):
    keep = [t for t in ts if not _is_id(t)]
    if not keep:
        return Id(ts[0].source)
    return keep[0] if len(keep) == 1 else Compose(tuple(keep))


def _leaves(t):
    return frozenset(list_type(t))


def _restrict_tree(t, keep):
    if isinstance(t, Unit):
        return t
    if isinstance(t, Atom):
        return t if t.name in keep else N
    parts = [_restrict_tree(c, keep) for c in t.children]
    return seq_all(parts) if isinstance(t, Seq) else par_all(parts)


class _Synth:
    def __init__(self, labels):
        self.labels = labels

    def ty(self, t):
        return map_types(lambda i: self.labels[i], t)

    def permute(self, kids, order):
        """Adjacent symmetries taking Par(kids) to Par(kids[order])."""
        cur = list(range(len(kids)))
        steps = []
        target = list(order)
        for pos, want in enumerate(target):
            k = cur.index(want)
            while k > pos:
                left = par_all(self.ty(kids[i]) for i in cur[:k - 1])
                right = par_all(self.ty(kids[i]) for i in cur[k + 1:])
                swap = Sym(self.ty(kids[cur[k - 1]]), self.ty(kids[cur[k]]))
                steps.append(_par_of([Id(left), swap, Id(right)]))
                cur[k - 1], cur[k] = cur[k], cur[k - 1]
                k -= 1
        if not steps:
            return Id(self.ty(Par(tuple(kids))))
        return steps[0] if len(steps) == 1 else Compose(tuple(steps))

    def interchange2(self, A, B):
        if len(A) == 1:
            return Id(self.ty(par_e(A[0], B[0])))
        ra, rb = seq_all(A[1:]), seq_all(B[1:])
        x, y, z, w = (self.ty(v) for v in (A[0], B[0], ra, rb))
        if (x == N and z == N) or (y == N and w == N) or (x == N and y == N) or (z == N and w == N):
            d = Id(par_e(seq_e(x, z), seq_e(y, w)))
            if d.expr != seq_e(par_e(x, y), par_e(z, w)):
                d = Dist(x, y, z, w)
        else:
            d = Dist(x, y, z, w)
        rest = self.interchange2(A[1:], B[1:])
        return _compose(d, _seq_of([Id(self.ty(par_e(A[0], B[0]))), rest]))

    def interchange(self, rows):
        term = Id(self.ty(seq_all(rows[0])))
        acc = list(rows[0])
        for r in rows[1:]:
            t2 = self.interchange2(acc, r)
            term = _compose(_par_of([term, Id(self.ty(seq_all(r)))]), t2)
            acc = [par_e(a, b) for a, b in zip(acc, r)]
        return term

    def __call__(self, E, F):
        if isinstance(E, Unit) or isinstance(F, Unit):
            if E == F:
                return Id(N)
            raise InvalidInclusion("unit against non-unit")
        if isinstance(E, Atom) or isinstance(F, Atom):
            if E == F:
                return Id(self.ty(E))
            raise InvalidInclusion(f"leaf mismatch {E} / {F}")
        if _leaves(E) != _leaves(F):
            raise InvalidInclusion("element sets differ")
        if isinstance(E, Seq):
            if not isinstance(F, Seq):
                raise InvalidInclusion("a sequence cannot include into a tensor")
            owners = []
            for f in F.children:
                lf = _leaves(f)
                idx = [i for i, e in enumerate(E.children) if lf <= _leaves(e)]
                if not idx:
                    raise InvalidInclusion("sequence blocks are not refined")
                owners.append(idx[0])
            if owners != sorted(owners):
                raise InvalidInclusion("sequence order is not preserved")
            groups = [seq_all(f for f, o in zip(F.children, owners) if o == i) for i in range(len(E.children))]
            return _seq_of([self(e, g) for e, g in zip(E.children, groups)])
        if isinstance(F, Par):
            owners = []
            for e in E.children:
                le = _leaves(e)
                idx = [j for j, f in enumerate(F.children) if le <= _leaves(f)]
                if not idx:
                    raise InvalidInclusion("tensor components are not refined")
                owners.append(idx[0])
            order = sorted(range(len(E.children)), key=lambda i: (owners[i], i))
            perm = self.permute(E.children, order)
            groups = [par_all(E.children[i] for i in order if owners[i] == j) for j in range(len(F.children))]
            return _compose(perm, _par_of([self(g, f) for g, f in zip(groups, F.children)]))
        # E is a tensor, F a sequence
        cols = [_leaves(f) for f in F.children]
        rows = [[_restrict_tree(e, c) for c in cols] for e in E.children]
        step1 = _par_of([self(e, seq_all(r)) for e, r in zip(E.children, rows)])
        step2 = self.interchange(rows)
        step3 = _seq_of([self(par_all(r[j] for r in rows), f) for j, f in enumerate(F.children)])
        return _compose(step1, step2, step3)


def structure_term(labels: Sequence, source_tagged: Expression, target_tagged: Expression) -> StructureTerm:
    """Structure term between two tagged expressions over the same elements.

    ``labels[i]`` is the type of element ``i``. The encoded source must
    include into the encoded target along the identity on elements.
    """
    return _Synth(labels)(source_tagged, target_tagged)


def synthesize_structure_map(inc: Inclusion) -> StructureTerm:
    """A structure term ``decode(source) -> decode(target)`` realizing ``inc``."""
    s_tag = decode_tagged(inc.source)
    t_tag = decode_tagged(inc.target)
    # rename source elements to their images so both trees share element ids
    s_tag = map_types(lambda x: inc.mapping[x], s_tag)
    return structure_term(inc.target.labels, s_tag, t_tag)


# -- enumeration -------------------------------------------------------------

def enumerate_expressions(n: int, types) -> list:
    """Canonical representatives of expressions with ``n`` atoms, up to symmetry."""
    if n > MAX_ENUMERATE:
        raise SizeLimit(f"enumeration is limited to n <= {MAX_ENUMERATE}")
    types = sorted(set(types))

    @functools.lru_cache(maxsize=None)
    def nonseq(k):
        return tuple(e for e in exprs(k) if not isinstance(e, Seq))

    @functools.lru_cache(maxsize=None)
    def nonpar(k):
        return tuple(e for e in exprs(k) if not isinstance(e, Par))

    def compositions(k):
        if k == 0:
            yield ()
            return
        for first in range(1, k + 1):
            for rest in compositions(k - first):
                yield (first,) + rest

    @functools.lru_cache(maxsize=None)
    def exprs(k):
        if k == 0:
            return (N,)
        out = {}
        if k == 1:
            for t in types:
                out[canonical_key(Atom(t))] = Atom(t)
            return tuple(out.values())
        for comp in compositions(k):
            if len(comp) < 2:
                continue
            for kids in itertools.product(*(nonseq(c) for c in comp)):
                e = Seq(kids)
                out.setdefault(canonical_key(e), e)
            for kids in itertools.product(*(nonpar(c) for c in comp)):
                if list(map(canonical_key, kids)) != sorted(map(canonical_key, kids)):
                    continue
                e = Par(kids)
                out.setdefault(canonical_key(e), e)
        return tuple(out[key] for key in sorted(out))

    if n == 0:
        return [N]
    return list(exprs(n))


def enumerate_zetless(n: int, types) -> list:
    """All zetless posets of cardinality ``n`` typed over ``types``, up to isomorphism."""
    return [encode(e) for e in enumerate_expressions(n, types)]


def structure_map(e1: Expression, e2: Expression) -> Optional[StructureTerm]:
    """A structure term ``e1 -> e2`` between the given expressions, or None."""
    inc = inclusion_exists(encode(e1), encode(e2))
    if inc is None:
        return None
    src = map_types(lambda x: inc.mapping[x], tag(e1))
    return structure_term(inc.target.labels, src, tag(e2))
