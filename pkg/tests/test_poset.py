import itertools
import random

import pytest

from duoidal import poset as P
from duoidal.errors import (
    AntisymmetryViolation, ElementError, NotBracketed, NotInterval, NotZetless,
)
from duoidal.poset import PrimalityKind, SubsetRef
from duoidal.zetless import decode

from helpers import all_posets, brute_isomorphic, natural_posets, random_poset

SMALL = [p for n in range(5) for p in all_posets(n)]
SMALL_TYPED = [p for n in range(4) for p in all_posets(n, ("A", "B"))]
FIVE = natural_posets(5)


def poset(labels, *pairs):
    return P.from_relation(labels, pairs)


Z = poset("AAAA", (0, 1), (2, 1), (2, 3))  # x <= u >= y <= v


def subsets(n):
    for k in range(n + 1):
        yield from itertools.combinations(range(n), k)


def random_posets(seed, count, sizes=(5, 6)):
    rng = random.Random(seed)
    return [random_poset(rng, rng.choice(sizes), rng.choice([0.15, 0.3, 0.5])) for _ in range(count)]


# -- examples -----------------------------------------------------------------

def test_from_generators():
    p = P.from_generators(2, ["A", "B"], [])
    assert p.incomparable(0, 1)
    chain = P.from_generators(3, ["A"] * 3, [(0, 1), (1, 2)])
    assert chain.le(0, 2)
    with pytest.raises(AntisymmetryViolation):
        P.from_generators(2, ["A", "A"], [(0, 1), (1, 0)])
    with pytest.raises(ElementError):
        P.from_generators(2, ["A", "A"], [(0, 2)])


def test_seq_and_tensor_examples():
    a, b, c = P.singleton("A"), P.singleton("B"), P.singleton("C")
    q = poset("AB", (0, 1))
    assert P.seq(P.empty(), q) == q
    assert P.seq(a, b).le(0, 1)
    s = P.seq(P.tensor(a, b), c)
    assert s.le(0, 2) and s.le(1, 2) and s.incomparable(0, 1)
    assert P.tensor(P.empty(), q) == q
    assert P.tensor(a, b).incomparable(0, 1)
    t = P.tensor(q, c)
    assert t.le(0, 1) and t.incomparable(0, 2) and t.incomparable(1, 2)


def test_components_examples():
    conn, inc = P.components(poset("AB"))
    assert sorted(map(sorted, conn)) == [[0], [1]] and sorted(map(sorted, inc)) == [[0, 1]]
    conn, inc = P.components(poset("AB", (0, 1)))
    assert sorted(map(sorted, conn)) == [[0, 1]] and sorted(map(sorted, inc)) == [[0], [1]]
    conn, inc = P.components(Z)
    assert len(conn) == 1 and len(inc) == 1


def test_zetless_examples():
    assert not P.is_zetless(Z)
    assert P.z_witness(Z) == (0, 1, 2, 3)
    assert P.is_zetless(poset("AAAA", (0, 1), (1, 2), (2, 3)))
    five = poset("AAAAA", (0, 1), (2, 1), (2, 3), (0, 4), (3, 4))
    assert not P.is_zetless(five)
    w = P.z_witness(five)
    sub = P.restrict(five, list(w))
    assert P.isomorphic(sub, Z)


def test_span_or_cospan_examples():
    assert P.has_span_or_cospan(poset("AA", (0, 1)), 0, 1)
    assert not P.has_span_or_cospan(Z, 0, 3)
    assert not P.has_span_or_cospan(poset("AA"), 0, 1)
    with pytest.raises(ElementError):
        P.has_span_or_cospan(Z, 0, 9)


def test_primality_examples():
    r = P.primality(poset("AAA", (0, 1)))
    assert r.kind is PrimalityKind.SEQ_PRIME and r.seq_prime and not r.par_prime
    r = P.primality(poset("AA", (0, 1)))
    assert r.kind is PrimalityKind.PAR_PRIME and r.par_prime and not r.seq_prime
    assert P.primality(P.singleton("A")).kind is PrimalityKind.SINGLETON
    assert P.primality(P.empty()).kind is PrimalityKind.EMPTY
    z = P.primality(Z)
    assert z.ambiguous and z.par_prime and z.seq_prime


def test_interval_examples():
    chain = poset("AAA", (0, 1), (1, 2))
    assert not P.is_interval(SubsetRef(chain, {0, 2}))
    assert P.is_interval(SubsetRef(chain, {0, 1}))
    assert P.is_interval(SubsetRef(poset("AAA", (0, 1), (0, 2), (1, 2)), {0, 1}))


def test_substitute_examples():
    q = poset("AA", (0, 1))
    r = P.substitute(q, 1, poset("BC"))
    assert r.labels == ("A", "B", "C")
    assert r.le(0, 1) and r.le(0, 2) and r.incomparable(1, 2)
    assert P.isomorphic(P.substitute(q, 0, P.singleton("A")), q)
    p = poset("BCD", (0, 2))
    assert P.substitute(P.singleton("X"), 0, p) == p
    with pytest.raises(ElementError):
        P.substitute(q, 5, p)


def test_bracketed_examples():
    # a <= x, y apart: {x, y} is not bracketed
    p = poset("AXY", (0, 1))
    assert not P.is_bracketed(SubsetRef(p, {1, 2}))
    assert P.is_bracketed(SubsetRef(poset("AXY", (0, 1), (0, 2)), {1, 2}))
    assert P.is_bracketed(SubsetRef(p, {0, 1, 2}))


def test_extract_examples():
    parent = poset("ABC", (0, 1), (0, 2), (1, 2))
    ex = P.extract(SubsetRef(parent, {1}))
    assert ex.outer.labels == ("A", "C", P.HOLE)
    assert ex.outer.le(0, 2) and ex.outer.le(0, 1) and ex.outer.le(2, 1)
    assert ex.inner.labels == ("B",)
    whole = P.extract(SubsetRef(parent, {0, 1, 2}))
    assert whole.outer.n == 1 and whole.inner == parent
    with pytest.raises(NotBracketed):
        P.extract(SubsetRef(poset("AXY", (0, 1)), {1, 2}))


def test_saturate_examples():
    p = poset("AXY", (0, 1))
    s = P.saturate_for_interval(SubsetRef(p, {1, 2}))
    assert s.le(0, 2) and P.is_bracketed(SubsetRef(s, {1, 2}))
    q = poset("AXY", (0, 1), (0, 2))
    assert P.saturate_for_interval(SubsetRef(q, {1, 2})) == q
    with pytest.raises(NotInterval):
        P.saturate_for_interval(SubsetRef(poset("AAA", (0, 1), (1, 2)), {0, 2}))


def test_subset_out_of_range():
    with pytest.raises(ElementError):
        SubsetRef(Z, {7})


# -- oracle suites --------------------------------------------------------------

def _brute_z(p):
    """Induced Z by looking at every 4-subset and every bijection to the Z shape."""
    for quad in itertools.combinations(range(p.n), 4):
        sub = P.restrict(p, quad)
        if brute_isomorphic(P.TypedPoset(("A",) * 4, sub.leq), Z):
            return True
    return False


@pytest.mark.parametrize("p", SMALL_TYPED + [p for p in all_posets(4)])
def test_decode_fails_exactly_on_z(p):
    zetless = P.is_zetless(p)
    assert zetless == (not _brute_z(p))
    if zetless:
        decode(p)
    else:
        with pytest.raises(NotZetless):
            decode(p)


def test_decode_fails_exactly_on_z_random_larger():
    for p in random_posets(1, 300) + FIVE:
        zetless = P.is_zetless(p)
        assert zetless == (not _brute_z(p))
        try:
            decode(p)
            decoded = True
        except NotZetless:
            decoded = False
        assert decoded == zetless


def _connected_brute(n, adjacent):
    if n <= 1:
        return True
    seen, todo = {0}, [0]
    while todo:
        x = todo.pop()
        for y in range(n):
            if y not in seen and adjacent(x, y):
                seen.add(y)
                todo.append(y)
    return len(seen) == n


def test_primality_characterisation():
    for p in SMALL + FIVE:
        if p.n < 2:
            continue
        r = P.primality(p)
        assert r.par_prime == _connected_brute(p.n, p.comparable)
        assert r.seq_prime == _connected_brute(p.n, lambda x, y: x != y and p.incomparable(x, y))
        if P.is_zetless(p):
            assert r.par_prime != r.seq_prime and not r.ambiguous
            assert r.kind is (PrimalityKind.PAR_PRIME if r.par_prime else PrimalityKind.SEQ_PRIME)


def test_zetless_gives_span_or_cospan():
    checked = 0
    for p in SMALL + FIVE + random_posets(2, 200):
        if not P.is_zetless(p):
            continue
        for comp in P.components(p)[0]:
            for x, y in itertools.combinations(sorted(comp), 2):
                assert P.has_span_or_cospan(p, x, y)
                checked += 1
    assert checked > 1000


def test_span_or_cospan_converse_fails():
    # every connected pair has a span or cospan, yet the poset contains a Z
    p = poset("AAAAA", (0, 1), (2, 1), (2, 3), (0, 4), (3, 4))
    assert not P.is_zetless(p)
    assert all(P.has_span_or_cospan(p, x, y) for x in range(5) for y in range(5))


def test_seq_and_tensor_preserve_zetless():
    small = [p for n in range(4) for p in natural_posets(n)]
    pairs = [(a, b) for a in small for b in small]
    rng = random.Random(3)
    zl = [p for p in random_posets(3, 300, (3, 4, 5)) if P.is_zetless(p)]
    pairs += [(rng.choice(zl), rng.choice(zl)) for _ in range(200)]
    for a, b in pairs:
        assert P.is_zetless(P.seq(a, b))
        assert P.is_zetless(P.tensor(a, b))


def _random_small(rng, max_n=4):
    return random_poset(rng, rng.randint(1, max_n), rng.choice([0.2, 0.4, 0.7]))


def test_parallel_substitution_commutes():
    rng = random.Random(4)
    for _ in range(400):
        q = random_poset(rng, rng.randint(2, 4), 0.4)
        p1, p2 = _random_small(rng), _random_small(rng)
        x, y = rng.sample(range(q.n), 2)
        y1 = y if y < x else y - 1
        x2 = x if x < y else x - 1
        left = P.substitute(P.substitute(q, x, p1), y1, p2)
        right = P.substitute(P.substitute(q, y, p2), x2, p1)
        assert P.isomorphic(left, right)
        assert left.n == right.n == q.n - 2 + p1.n + p2.n


def test_nested_substitution_associates():
    rng = random.Random(5)
    for _ in range(400):
        q, p, r = _random_small(rng), _random_small(rng), _random_small(rng)
        x, y = rng.randrange(q.n), rng.randrange(p.n)
        left = P.substitute(P.substitute(q, x, p), q.n - 1 + y, r)
        right = P.substitute(q, x, P.substitute(p, y, r))
        assert left == right


def test_substitution_unit_laws():
    for p in SMALL_TYPED:
        if p.n:
            assert P.isomorphic(P.substitute(P.singleton("Z"), 0, p), p)
            x = p.n - 1
            assert P.isomorphic(P.substitute(p, x, P.singleton(p.labels[x])), p)


def _factorizations(p, members):
    """Outer posets (rest + hole) whose substitution gives back ``p`` on the nose."""
    S = sorted(members)
    rest = [r for r in range(p.n) if r not in members]
    order = rest + S
    pos = {e: i for i, e in enumerate(order)}
    target = {(pos[a], pos[b]) for a, b in p.leq}
    inner = P.restrict(p, S)
    base = [(i, j) for i, a in enumerate(rest) for j, b in enumerate(rest) if p.le(a, b)]
    h = len(rest)
    found = 0
    for rels in itertools.product("<>|", repeat=len(rest)):
        pairs = base + [(i, h) for i, r in enumerate(rels) if r == "<"] + [(h, i) for i, r in enumerate(rels) if r == ">"]
        try:
            outer = P.from_relation(tuple(p.labels[r] for r in rest) + ("H",), pairs)
        except AntisymmetryViolation:
            continue
        if set(P.substitute(outer, h, inner).leq) == target:
            found += 1
    return found


def test_bracketed_extract_substitution_agree():
    for p in SMALL + random_posets(6, 60):
        for members in subsets(p.n):
            if not members:
                continue
            s = SubsetRef(p, members)
            bracketed = P.is_bracketed(s)
            try:
                ex = P.extract(s)
            except NotBracketed:
                ex = None
            assert (ex is not None) == bracketed
            assert (_factorizations(p, set(members)) > 0) == bracketed
            if ex is not None:
                back = P.substitute(ex.outer, ex.hole, ex.inner)
                assert P.isomorphic(P.TypedPoset(p.labels, p.leq), back)
                # elementwise: the recorded element maps make it exact
                order = list(ex.outer_elements) + list(ex.inner_elements)
                assert {(order[a], order[b]) for a, b in back.leq} == set(p.leq)
                assert P.is_interval(s)


def test_interval_iff_bracketed_in_some_saturation():
    shapes = [p for n in range(5) for p in all_posets(n)]
    by_n = {}
    for p in shapes:
        by_n.setdefault(p.n, []).append(p)
    for p in shapes:
        supers = [r for r in by_n[p.n] if p.leq <= r.leq]
        for members in subsets(p.n):
            s = SubsetRef(p, members)
            some = any(P.is_bracketed(SubsetRef(r, members)) for r in supers)
            assert P.is_interval(s) == some
            if P.is_interval(s):
                sat = P.saturate_for_interval(s)
                assert p.leq <= sat.leq
                assert P.is_bracketed(SubsetRef(sat, members))


def test_saturation_random_larger():
    for p in random_posets(7, 150):
        for members in subsets(p.n):
            s = SubsetRef(p, members)
            if P.is_interval(s):
                sat = P.saturate_for_interval(s)
                assert p.leq <= sat.leq and P.is_bracketed(SubsetRef(sat, members))
            else:
                with pytest.raises(NotInterval):
                    P.saturate_for_interval(s)


def test_canonical_form_matches_brute_isomorphism():
    rng = random.Random(8)
    typed = [p for n in range(4) for p in all_posets(n, ("A", "B"))]
    for _ in range(1500):
        a = rng.choice(typed)
        same = [q for q in typed if q.n == a.n]
        b = rng.choice(same)
        assert P.isomorphic(a, b) == brute_isomorphic(a, b)
        perm = list(range(a.n))
        rng.shuffle(perm)
        moved = P.TypedPoset(
            tuple(a.labels[perm.index(i)] for i in range(a.n)),
            frozenset((perm[x], perm[y]) for x, y in a.leq),
        )
        assert P.canonical_form(moved) == P.canonical_form(a)
