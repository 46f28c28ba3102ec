"""End-to-end acceptance checks, one test per criterion.

Each test prints a PASS line when run with ``-s``; the terminal summary
(see conftest.py) lists every criterion with its verdict either way.
"""
import io
import json
import random
import time
from pathlib import Path

import duoidal
from duoidal import diagram as D
from duoidal import poset as P
from duoidal.cli import main
from duoidal.expr import parse, sym_equal, to_text
from duoidal.terms import load
from duoidal.zetless import decode, encode

import test_diagram as diagram_laws
import test_evaluation as eval_laws
import test_poset as poset_oracles
from helpers import Fresh, random_diagram, random_expr

FIXTURES = Path(duoidal.__file__).parent / "fixtures"
CASES = 500


def timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def report(num, text):
    print(f"criterion {num}: PASS  {text}")


def test_criterion_1_enumeration_count():
    def run():
        out = io.StringIO()
        code = main(["enumerate", "2", "--types", "A,B"], out, io.StringIO())
        return code, out.getvalue().splitlines()

    (code, lines), seconds = timed(run)
    assert code == 0
    assert lines[-1] == "count: 7"
    assert len(lines) - 1 == 7
    assert seconds < 1.0
    report(1, f"7 zetless posets of size 2 over {{A, B}} in {seconds:.3f}s")


def test_criterion_2_running_example():
    def run():
        d = load(FIXTURES / "timeline.duo").diagram("timeline")
        D.validate(d)
        return d, D.derived_poset(d)

    (d, po), seconds = timed(run)
    assert d.target == parse("(U * V) > C")
    out = d.outputs
    strict = {(d.wires[a], d.wires[b]) for a in out for b in out if po.lt(a, b)}
    assert strict == {("U", "C"), ("V", "C")}
    u, v = (w for w in out if d.wires[w] in "UV")
    assert po.incomparable(u, v)
    assert seconds < 1.0
    report(2, f"target {to_text(d.target)}, output order u<=c, v<=c, u || v in {seconds:.3f}s")


def test_criterion_3_spaciality():
    def run():
        f = load(FIXTURES / "spacial.duo")
        return D.equal(f.diagram("lhs"), f.diagram("rhs"))

    same, seconds = timed(run)
    assert same
    assert seconds < 1.0
    report(3, f"id_A > alpha equals alpha > id_A in {seconds:.3f}s")


LAW_CHECKS = [
    diagram_laws.check_compose_associative_and_unital,
    diagram_laws.check_tensor_and_sequence_associative_with_shared_unit,
    diagram_laws.check_interchange_with_tensor,
    diagram_laws.check_interchange_with_sequence,
    diagram_laws.check_distributor_is_natural,
]


def test_criterion_4_law_suite():
    for check in LAW_CHECKS:
        for seed in range(CASES):
            check(seed)
    report(4, f"{len(LAW_CHECKS)} law families x {CASES} random cases, zero failures")


POSET_ORACLES = [
    poset_oracles.test_decode_fails_exactly_on_z_random_larger,
    poset_oracles.test_primality_characterisation,
    poset_oracles.test_zetless_gives_span_or_cospan,
    poset_oracles.test_span_or_cospan_converse_fails,
    poset_oracles.test_seq_and_tensor_preserve_zetless,
    poset_oracles.test_parallel_substitution_commutes,
    poset_oracles.test_nested_substitution_associates,
    poset_oracles.test_bracketed_extract_substitution_agree,
    poset_oracles.test_interval_iff_bracketed_in_some_saturation,
    poset_oracles.test_saturation_random_larger,
]


def test_criterion_5_poset_oracles():
    def run():
        for p in poset_oracles.SMALL_TYPED + poset_oracles.SMALL:
            poset_oracles.test_decode_fails_exactly_on_z(p)
        for check in POSET_ORACLES:
            check()

    _, seconds = timed(run)
    assert seconds < 60.0
    report(5, f"exhaustive to size 4 plus random sizes 5-6 in {seconds:.1f}s")


def test_criterion_6_free_interpretation():
    orders = 0
    for seed in range(CASES):
        eval_laws.check_every_order_agrees(seed)
        orders += 1
    for seed in range(CASES):
        eval_laws.check_functorial_on_composable_pairs(seed)
    report(6, f"{orders} diagrams over all firing orders, {CASES} composable pairs")


def test_criterion_7_round_trips():
    for seed in range(1000):
        rng = random.Random(seed)
        e = random_expr(rng, rng.randint(0, 8))
        assert sym_equal(decode(encode(e)), e)
        assert parse(to_text(e)) == e
    for seed in range(CASES):
        rng = random.Random(seed)
        fresh = Fresh(rng)
        d = random_diagram(rng, fresh, steps=rng.randint(0, 4), max_atoms=4)
        assert D.from_json(json.loads(json.dumps(D.to_json(d))), fresh.sig) == d
        assert D.equal(D.recompose(D.decomposition(d)), d)
    report(7, f"1000 expressions, {CASES} diagrams serialized and decomposed")
