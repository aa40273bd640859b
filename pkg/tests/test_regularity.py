import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dreg.arith import MultiPoly
from dreg.errors import NoRationalPoint, UsageError
from dreg.rank import holonomic_rank
from dreg.regularity import (AFFINE, INCONCLUSIVE, IRREGULAR, REGULAR, STABLE, UNSAMPLED,
                             RegularityOptions, dehomogenize, generic_point, gr_rank_at_point,
                             homogenize_affine, homogenize_chart, irregular_support,
                             irregularity_divisor, is_regular, label_string)
from dreg.weyl import DIdeal
from conftest import ds, euler, exp_inverse_x1, xs
from strategies import nonzero_rationals


def v3():
    return [MultiPoly.variable(3, i) for i in range(3)]


def support_of(records):
    return sorted(label_string(r.label) for r in records if r.status == STABLE and r.irr_mult > 0)


def by_label(records):
    return {label_string(r.label): r for r in records}


# -- generic points ------------------------------------------------------


@pytest.mark.parametrize("seed", [0, 1, 7, 12345])
def test_generic_point_on_coordinate_plane(seed):
    x1, x2, x3 = v3()
    p = generic_point(x2, [x1, x3], seed=seed)
    assert p[1] == 0 and p[0] != 0 and p[2] != 0


def test_generic_point_avoids_cone():
    x1, x2, x3 = v3()
    cone = x2 ** 2 - 4 * x1 * x3
    p = generic_point(x1, [x3, cone], seed=3)
    assert x1.evaluate(p) == 0
    assert x3.evaluate(p) != 0 and cone.evaluate(p) != 0
    # the hand-picked point is admissible too
    q = (0, 1, 1)
    assert x1.evaluate(q) == 0 and x3.evaluate(q) != 0 and cone.evaluate(q) != 0


def test_generic_point_no_real_locus():
    x1, x2 = [MultiPoly.variable(2, i) for i in range(2)]
    with pytest.raises(NoRationalPoint):
        generic_point(x1 ** 2 + x2 ** 2 + 1, seed=0, max_rounds=2)


def test_generic_point_deterministic():
    x1, x2, x3 = v3()
    f = x2 ** 2 - 4 * x1 * x3
    assert generic_point(f, [x1, x3], seed=11) == generic_point(f, [x1, x3], seed=11)


def test_generic_point_rejects_bad_input():
    x1, _, _ = v3()
    with pytest.raises(UsageError):
        generic_point(MultiPoly.zero(3))
    with pytest.raises(UsageError):
        generic_point(x1, [MultiPoly.zero(3)])


@settings(max_examples=40, deadline=None)
@given(st.lists(nonzero_rationals, min_size=3, max_size=3), nonzero_rationals,
       st.integers(0, 10 ** 6))
def test_generic_point_satisfies_constraints(coeffs, c0, seed):
    x1, x2, x3 = v3()
    f = coeffs[0] * x1 + coeffs[1] * x2 + coeffs[2] * x3 + c0
    avoid = [x1, x2, x3, x1 + x2 - 1]
    p = generic_point(f, avoid, seed=seed)
    assert f.evaluate(p) == 0
    assert all(q.evaluate(p) != 0 for q in avoid)
    assert all(abs(c.numerator) <= 10 ** 6 for c in p)


# -- gr-rank -------------------------------------------------------------


def test_gr_rank_gkz_reg(gkz_reg):
    assert gr_rank_at_point(gkz_reg, (0, 1, 1)) == 2


def test_gr_rank_gkz_irr_on_x2(gkz_irr):
    x1, x2, x3 = v3()
    p = generic_point(x2, [x1, x3], seed=5)
    assert gr_rank_at_point(gkz_irr, p) == 1
    assert gr_rank_at_point(gkz_irr, (1, 0, 1)) == 1


def test_gr_rank_exponential_torsion():
    (x,), (d,) = xs(1), ds(1)
    assert gr_rank_at_point(DIdeal(1, [x * x * d + 1]), (0,)) == 0


def test_gr_rank_smooth_point_equals_rank(gkz_irr):
    assert gr_rank_at_point(gkz_irr, (1, 2, 3)) == 2


def test_gr_rank_wrong_length(gkz_irr):
    with pytest.raises(UsageError):
        gr_rank_at_point(gkz_irr, (1, 2))


# -- support, divisor, verdict ------------------------------------------


def test_support_gkz_irr(gkz_irr):
    recs = by_label(irregular_support(gkz_irr))
    assert recs["x2"].irr_mult == 1
    assert recs["x1"].irr_mult == 0 and recs["x3"].irr_mult == 0
    assert all(r.status == STABLE for r in recs.values())


def test_support_gkz_reg(gkz_reg):
    recs = irregular_support(gkz_reg)
    assert support_of(recs) == []
    assert sorted(by_label(recs)) == ["x1", "x2^2 - 4*x1*x3", "x3"]


def test_support_exponential(exp_pole):
    recs = irregular_support(exp_pole)
    assert support_of(recs) == ["x1"]
    assert by_label(recs)["x1"].irr_mult == 1


def test_support_user_components(gkz_irr):
    x1, x2, x3 = v3()
    recs = irregular_support(gkz_irr, [x2])
    assert [label_string(r.label) for r in recs] == ["x2"]
    assert recs[0].irr_mult == 1


def test_divisor_examples(gkz_reg, gkz_irr, exp_pole):
    assert irregularity_divisor(gkz_irr).as_dict() == {"x2": 1}
    assert irregularity_divisor(gkz_reg).is_zero()
    assert irregularity_divisor(exp_pole).as_dict() == {"x1": 1}


def test_divisor_affine_entries(gkz_irr):
    d = irregularity_divisor(gkz_irr)
    assert [(f.to_str(), m) for f, m in d.affine_entries()] == [("x2", 1)]


def test_regular_gkz_reg_with_infinity(gkz_reg):
    report = is_regular(gkz_reg, RegularityOptions(check_infinity=True))
    assert report.verdict == REGULAR
    assert report.rank == 2 and report.infinity_checked
    assert report.divisor.is_zero()


def test_regular_gkz_irr(gkz_irr):
    report = is_regular(gkz_irr)
    assert report.verdict == IRREGULAR
    assert report.divisor.as_dict() == {"x2": 1}


def test_regular_euler_with_infinity():
    report = is_regular(euler(), RegularityOptions(check_infinity=True))
    assert report.verdict == REGULAR
    assert sorted({r.chart for r in report.records}) == [AFFINE, 1]
    assert all(r.gr_ranks == [1] for r in report.records)


def test_affine_only_is_never_regular():
    report = is_regular(euler())
    assert report.verdict == INCONCLUSIVE
    assert any("infinity" in c for c in report.caveats)


def test_unsampled_component_degrades_verdict():
    # the only component has no rational point
    x, d = xs(2), ds(2)
    f = x[0] ** 2 + x[1] ** 2 + 1
    P = DIdeal(2, [f * d[0] - 1, d[1]])
    opts = RegularityOptions(components=[MultiPoly.variable(2, 0) ** 2
                                         + MultiPoly.variable(2, 1) ** 2 + 1],
                             max_rounds=1, tries_per_round=4)
    report = is_regular(P, opts)
    assert report.records[0].status == UNSAMPLED
    assert report.verdict == INCONCLUSIVE


def test_bad_chart_index(gkz_irr):
    with pytest.raises(UsageError):
        is_regular(gkz_irr, RegularityOptions(check_infinity=True, charts=(4,)))


# -- invariants ----------------------------------------------------------


@pytest.mark.parametrize("make", ["exp_pole", "gkz_reg", "gkz_irr"])
def test_point_independence(make, request):
    I = request.getfixturevalue(make)
    for rec in irregular_support(I):
        assert len(rec.points) >= 3
        assert len(set(rec.gr_ranks)) == 1
        assert rec.status == STABLE


def test_effectivity(gkz_reg, gkz_irr, exp_pole):
    for I in (gkz_reg, gkz_irr, exp_pole):
        r = int(holonomic_rank(I))
        for rec in irregular_support(I):
            assert all(0 <= g <= r for g in rec.gr_ranks)
            assert rec.irr_mult >= 0


def test_chart_coherence(gkz_irr):
    report = is_regular(gkz_irr, RegularityOptions(check_infinity=True))
    seen = {}
    for rec in report.records:
        if rec.status == STABLE:
            seen.setdefault(rec.label, set()).add(rec.irr_mult)
    assert all(len(v) == 1 for v in seen.values())
    assert not any("coherence" in c for c in report.caveats)
    # V(x2) is visible in the affine chart and in charts 1 and 3
    charts_x2 = {r.chart for r in report.records if label_string(r.label) == "x2"}
    assert {AFFINE, 1, 3} <= charts_x2


def test_verdict_consistency(gkz_reg, gkz_irr):
    for I in (gkz_reg, gkz_irr):
        report = is_regular(I, RegularityOptions(check_infinity=True))
        all_stable = all(r.status == STABLE for r in report.records)
        assert (report.verdict == REGULAR) == (report.divisor.is_zero() and all_stable)


def test_seed_independence(gkz_irr):
    a = is_regular(gkz_irr, RegularityOptions(seed=1))
    b = is_regular(gkz_irr, RegularityOptions(seed=99))
    assert a.divisor.as_dict() == b.divisor.as_dict()
    assert a.verdict == b.verdict


def test_parallel_matches_serial(gkz_irr):
    a = is_regular(gkz_irr, RegularityOptions(seed=4))
    b = is_regular(gkz_irr, RegularityOptions(seed=4, jobs=3))
    assert [(r.label, r.points, r.gr_ranks) for r in a.records] == \
        [(r.label, r.points, r.gr_ranks) for r in b.records]


# -- labels --------------------------------------------------------------


def test_labels_round_trip():
    x1, x2, x3 = v3()
    f = x2 ** 2 - 4 * x1 * x3
    assert dehomogenize(homogenize_affine(f)) == f
    # in chart 1, y1 = X0/X1 is the hyperplane at infinity
    assert label_string(homogenize_chart(x1, 1)) == "x0"
    # y2 = X2/X1 is x2 seen from chart 1
    assert label_string(homogenize_chart(x2, 1)) == "x2"


def test_hyperplane_at_infinity_label_euler():
    report = is_regular(euler(), RegularityOptions(check_infinity=True))
    names = sorted(label_string(r.label) for r in report.records)
    assert names == ["x0", "x1"]


def test_exponential_irregular_at_origin_only():
    report = is_regular(exp_inverse_x1(), RegularityOptions(check_infinity=True))
    assert report.verdict == IRREGULAR
    assert report.divisor.as_dict()["x1"] == 1
