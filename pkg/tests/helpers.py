"""Random expressions, posets and diagrams shared by the test modules."""
import itertools
import random

from duoidal import poset as P
from duoidal.diagram import (
    compose, from_generator, identity, sequence, structure_diagram, tensor,
)
from duoidal.expr import Atom, N, Par, Seq, par_all, seq_all
from duoidal.signature import Signature
from duoidal.zetless import decode, encode

TYPES = ("A", "B", "C")


def random_expr(rng: random.Random, n: int, types=TYPES):
    """A reduced expression with exactly ``n`` atoms."""
    if n == 0:
        return N
    if n == 1:
        return Atom(rng.choice(types))
    k = rng.randint(2, n)
    cuts = sorted(rng.sample(range(1, n), k - 1))
    sizes = [b - a for a, b in zip([0] + cuts, cuts + [n])]
    kids = [random_expr(rng, m, types) for m in sizes]
    return (seq_all if rng.random() < 0.5 else par_all)(kids)


def all_posets(n, labels_choices=("A",)):
    """Every poset on ``n`` labelled points, each labelling in ``labels_choices``."""
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    seen = set()
    out = []
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        rel = [p for p, on in zip(pairs, bits) if on]
        up = P.close(n, rel)
        key = tuple(up)
        if key in seen:
            continue
        seen.add(key)
        if any(up[a] >> b & 1 and up[b] >> a & 1 for a in range(n) for b in range(n) if a != b):
            continue
        leq = [(a, b) for a in range(n) for b in range(n) if up[a] >> b & 1]
        for labels in itertools.product(labels_choices, repeat=n):
            out.append(P.from_relation(labels, leq))
    return out


def random_poset(rng, n, density=0.3, types=("A", "B")):
    pairs = [(a, b) for a in range(n) for b in range(n) if a < b and rng.random() < density]
    perm = list(range(n))
    rng.shuffle(perm)
    pairs = [(perm[a], perm[b]) for a, b in pairs]
    return P.from_relation([rng.choice(types) for _ in range(n)], pairs)


class Fresh:
    """Hands out generator names with random boundary types."""

    def __init__(self, rng, types=TYPES):
        self.rng = rng
        self.types = types
        self.sig = Signature(frozenset(types), {})
        self.count = 0

    def generator(self, source):
        name = f"g{self.count}"
        self.count += 1
        target = random_expr(self.rng, self.rng.choice([0, 1, 1, 2, 2, 3]), self.types)
        self.sig = self.sig.with_generator(name, source, target)
        return from_generator(self.sig, name)


def _spans(e):
    """Every (path, lo, hi) naming a sub-expression: a whole node or a run of children."""
    out = [((), None, None)]
    if isinstance(e, (Seq, Par)):
        k = len(e.children)
        for lo in range(k + 1):
            for hi in range(lo, k + 1):
                if (lo, hi) != (0, k):
                    out.append(((), lo, hi))
        for i, c in enumerate(e.children):
            out += [((i,) + p, lo, hi) for p, lo, hi in _spans(c)]
    return out


def _whisker(e, path, lo, hi, make, sig):
    """Identity on ``e`` except the selected span, which is replaced by ``make(span)``."""
    if path:
        i = path[0]
        parts = [identity(c, sig) for c in e.children]
        parts[i] = _whisker(e.children[i], path[1:], lo, hi, make, sig)
        op = sequence if isinstance(e, Seq) else tensor
        out = parts[0]
        for p in parts[1:]:
            out = op(out, p)
        return out
    if lo is None:
        return make(e)
    kids = e.children
    op = sequence if isinstance(e, Seq) else tensor
    build = seq_all if isinstance(e, Seq) else par_all
    parts = [identity(c, sig) for c in kids[:lo]]
    parts.append(make(build(kids[lo:hi])))
    parts += [identity(c, sig) for c in kids[hi:]]
    out = identity(N, sig)
    for p in parts:
        out = op(out, p)
    return out


def random_coarsening(rng, e):
    """A target reachable from ``e`` by a structure map: add an order pair, shuffle tensors."""
    p = encode(e)
    pairs = [(a, b) for a in range(p.n) for b in range(p.n) if a != b and p.incomparable(a, b)]
    rng.shuffle(pairs)
    for a, b in pairs[:3]:
        q = P.from_relation(p.labels, list(p.leq) + [(a, b)])
        if P.is_zetless(q):
            p = q
            break
    return _shuffle(rng, decode(p))


def _shuffle(rng, e):
    if isinstance(e, Par):
        kids = [_shuffle(rng, c) for c in e.children]
        rng.shuffle(kids)
        return Par(tuple(kids))
    if isinstance(e, Seq):
        return Seq(tuple(_shuffle(rng, c) for c in e.children))
    return e


def random_diagram(rng, fresh: Fresh, source=None, steps=None, max_atoms=3):
    """A valid diagram built from whiskered generators and structure maps."""
    if source is None:
        source = random_expr(rng, rng.randint(0, max_atoms), fresh.types)
    steps = rng.randint(0, 3) if steps is None else steps
    d = identity(source, fresh.sig)
    for _ in range(steps):
        t = d.target
        if rng.random() < 0.25:
            step = structure_diagram(t, random_coarsening(rng, t), fresh.sig)
        else:
            path, lo, hi = rng.choice(_spans(t))
            step = _whisker(t, path, lo, hi, fresh.generator, fresh.sig)
        d = compose(d, step)
    return d


def natural_posets(n, labels=None):
    """One representative of every poset shape on ``n`` points (each has a
    linear extension, so relations ``a < b`` with ``a < b`` as integers suffice)."""
    labels = labels or ("A",) * n
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    seen = set()
    out = []
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        up = tuple(P.close(n, [p for p, on in zip(pairs, bits) if on]))
        if up not in seen:
            seen.add(up)
            leq = [(a, b) for a in range(n) for b in range(n) if up[a] >> b & 1]
            out.append(P.from_relation(labels, leq))
    return out


def brute_isomorphic(p, q):
    if p.n != q.n:
        return False
    for perm in itertools.permutations(range(p.n)):
        if all(p.labels[x] == q.labels[perm[x]] for x in range(p.n)) and \
                {(perm[a], perm[b]) for a, b in p.leq} == set(q.leq):
            return True
    return False
