from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binsum import catalog, report, verifier
from binsum.dsl import format_expr
from binsum.verifier import GridSpec, RandomSpec


def spec(rid):
    s = catalog.lookup(rid)
    assert s is not None and s.id == rid
    return s


def alzer_mutant():
    return verifier.mutate(spec("S3.T3.A"), rhs="2^n + 1")


def test_s3_t1_l_default_grid():
    r = verifier.verify_grid(spec("S3.T1.L"))
    assert (r.attempted, r.evaluated, r.failure_count) == (21, 21, 0)


def test_s4_t1_small_grid():
    s = spec("S4.T1")
    r = verifier.verify_grid(s, GridSpec.parse("n=0..6,r=-3..3", s))
    assert (r.evaluated, r.failure_count) == (49, 0)


def test_alzer_mutant_first_failure():
    m = alzer_mutant()
    r = verifier.verify_grid(m, GridSpec.parse("n=0..5", m))
    assert r.failure_count == 6
    first = r.failures[0]
    assert first.kind == "mismatch"
    assert first.assignment == {"n": 0}
    assert (first.lhs, first.rhs) == (1, 2)
    assert verifier.first_failure(m).assignment == {"n": 0}


def test_evaluation_error_is_a_failure():
    # constraint dropped on purpose: F(r)=0 at r=0 divides by zero
    s = spec("S5.T1")
    bare = catalog.IdentitySpec(s.id + "~bare", s.title, s.anchor, s.params, (), s.lhs, s.rhs)
    r = verifier.verify_grid(bare, GridSpec.parse("n=1..1,r=0..0,s=1..1,m=0..0", bare))
    assert r.failure_count == 1
    f = r.failures[0]
    assert f.kind == "evaluation-error" and f.side in ("lhs", "rhs")


def test_shrink_examples():
    m = alzer_mutant()
    assert verifier.shrink(m, {"n": 5}) == {"n": 0}
    assert verifier.shrink(m, {"n": 0}) == {"n": 0}
    # a constant offset fails everywhere, so t has nothing to hold on to
    c = verifier.mutate(spec("S2.C2.F"), rhs=format_expr(spec("S2.C2.F").rhs) + "+1")
    small = verifier.shrink(c, {"n": 3, "r": 2, "s": -1, "t": 3})
    assert small["t"] == 0
    assert small == {"n": 0, "r": 0, "s": 0, "t": 0}


def test_shrink_leaves_passing_case_alone():
    assert verifier.shrink(spec("S3.T3.A"), {"n": 4}) == {"n": 4}


def test_failures_reevaluate_in_fresh_context():
    m = verifier.mutate(spec("S4.T2"), rhs="F(2*n+r-1)*sum(k=0..n, binom(n,k)^2*5^k)")
    r = verifier.verify_grid(m)
    assert r.failures
    for f in r.failures:
        inst = catalog.instantiate(m, verifier.assignment_from(m, f.assignment))
        assert (inst.lhs, inst.rhs) == (f.lhs, f.rhs) and inst.lhs != inst.rhs


def test_failure_order_independent_of_workers():
    m = verifier.mutate(spec("S4.T2"), rhs="F(2*n+r-1)*sum(k=0..n, binom(n,k)^2*5^k)")
    one = verifier.verify_all([m], workers=1)
    two = verifier.verify_all([m], workers=2)
    assert report.dumps(one) == report.dumps(two)


def test_random_reproducible():
    s = spec("S5.T1")
    rs = RandomSpec(seed=42, count=200)
    a, b = verifier.verify_random(s, rs), verifier.verify_random(s, rs)
    assert (a.evaluated, a.failure_count) == (200, 0)
    assert report.dumps(report.single(a, 200)) == report.dumps(report.single(b, 200))


def test_random_count_zero():
    r = verifier.verify_random(spec("S3.T1.L"), RandomSpec(count=0))
    assert (r.attempted, r.evaluated, r.failures) == (0, 0, [])


def test_random_catches_swapped_sequence():
    s = spec("S5.T1")
    m = verifier.mutate(s, rhs=format_expr(s.rhs).replace("F(s*(n-k)+m)", "L(s*(n-k)+m)"))
    r = verifier.verify_random(m, RandomSpec(seed=42, count=200))
    assert r.failure_count >= 1


def test_verify_all_empty_and_quarantine():
    assert verifier.verify_all([]).reports == []
    specs = [spec("S3.T1.L"), spec("S3.L2.B")]
    suite = verifier.verify_all(specs)
    assert [r.identity_id for r in suite.reports] == ["S3.T1.L"]
    assert suite.quarantined == ["S3.L2.B"]
    assert suite.passed
    assert "quarantined (not run): S3.L2.B" in suite.summary()


def test_default_grid_domains():
    g = GridSpec.default_for(spec("S2.L1"))
    assert str(g.domains["n"]) == "0..8"
    assert [v for v in g.iter_values() if v[0] == 2][:3] == [
        (2, 1, Fraction(-1, 2)), (2, 1, Fraction(1, 2)), (2, 1, Fraction(3, 2))]
    h = GridSpec.default_for(spec("S7.T2"))
    assert len(h.domains["horadam"].values({})) == 5


def test_grid_parse_errors():
    s = spec("S4.T1")
    for bad in ("n=3..1", "q=0..1", "n", "n=1/2"):
        with pytest.raises(verifier.GridError):
            GridSpec.parse(bad, s)


def test_grid_size_counted_in_advance():
    s = spec("S4.T1")
    g = GridSpec.parse("n=0..2,r=-1..1", s)
    assert g.size() == 9 == verifier.verify_grid(s, g).attempted


SMALL = ["S2.L1", "S5.T1", "S3.L2", "S6.Z45", "S7.C1.ODD.F.FIX"]


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(SMALL), st.integers(0, 3), st.integers(0, 3))
def test_skip_accounting(rid, lo, width):
    s = spec(rid)
    g = GridSpec.parse(f"n={lo}..{lo + width}", s)
    r = verifier.verify_grid(s, g)
    assert r.attempted == r.evaluated + r.skipped_total
    assert r.failure_count == 0
