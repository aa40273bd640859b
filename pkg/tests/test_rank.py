from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st
import pytest

from dreg.arith import MultiPoly, RationalFunction
from dreg.errors import NotFiniteRank
from dreg.rank import (INFINITE, RationalOperator, characteristic_ideal, holonomic_rank,
                       pfaffian_system, rational_weyl_gb, singular_locus)
from dreg.weyl import DIdeal, WeightVector, WeylElement, initial_ideal
from conftest import ds, xs
from strategies import small_rationals


def one_var():
    (x,), (d,) = xs(1), ds(1)
    return x, d


def rf(n, num, den=None):
    return RationalFunction(num, den if den is not None else MultiPoly.one(n))


def test_rational_gb_normalizes_leading_coefficient():
    x, d = one_var()
    gb = rational_weyl_gb(DIdeal(1, [x * d - 1]))
    X = MultiPoly.variable(1, 0)
    expected = RationalOperator(1, {(1,): rf(1, MultiPoly.one(1)),
                                    (0,): RationalFunction(-MultiPoly.one(1), X)})
    assert gb == [expected]


def test_rational_gb_of_derivations():
    d = ds(2)
    gb = rational_weyl_gb(DIdeal(2, d))
    assert sorted(g.leading_monomial() for g in gb) == [(0, 1), (1, 0)]
    assert all(len(g.terms) == 1 for g in gb)


def test_rational_gb_gkz_reg_two_standard_monomials(gkz_reg):
    from dreg.rank import standard_monomials
    gb = rational_weyl_gb(gkz_reg)
    assert len(standard_monomials(3, [g.leading_monomial() for g in gb])) == 2


@pytest.mark.parametrize("n", [1, 2, 3])
def test_rank_constants(n):
    assert holonomic_rank(DIdeal(n, ds(n))) == 1


def test_rank_log():
    x, d = one_var()
    assert holonomic_rank(DIdeal(1, [x * d * d + d])) == 2


def test_rank_examples(gkz_reg, gkz_irr, exp_pole):
    assert holonomic_rank(gkz_reg) == 2
    assert holonomic_rank(gkz_irr) == 2
    assert holonomic_rank(exp_pole) == 1


def test_rank_infinite():
    d = ds(2)
    r = holonomic_rank(DIdeal(2, [d[0]]))
    assert r.value == INFINITE and not r.is_finite
    with pytest.raises(NotFiniteRank):
        int(r)


def test_characteristic_ideal_derivations():
    n = 2
    ch = characteristic_ideal(DIdeal(n, ds(n)))
    xi = [MultiPoly.variable(2 * n, n + i) for i in range(n)]
    assert sorted(g.to_str() for g in ch.generators) == sorted(g.to_str() for g in xi)


def test_characteristic_ideal_log():
    x, d = one_var()
    ch = characteristic_ideal(DIdeal(1, [x * d * d + d]))
    X, XI = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    assert [g.primitive() for g in ch.generators] == [(X * XI ** 2).primitive()]


def _vanishes(ch, point):
    return all(g.evaluate(point) == 0 for g in ch.generators)


def test_characteristic_ideal_gkz_reg_conormals(gkz_reg):
    ch = characteristic_ideal(gkz_reg)
    # zero section
    assert _vanishes(ch, (2, 3, 5, 0, 0, 0))
    # conormal of V(x1) and V(x3)
    assert _vanishes(ch, (0, 3, 5, 7, 0, 0))
    assert _vanishes(ch, (2, 3, 0, 0, 0, 7))
    # conormal of the cone x2^2 - 4 x1 x3 at (1, 2, 1): gradient (-4, 4, -4)
    assert _vanishes(ch, (1, 2, 1, -4, 4, -4))
    assert _vanishes(ch, (1, 2, 1, mpq(-1, 2), mpq(1, 2), mpq(-1, 2)))
    # points off these four sets are not in the variety
    assert not _vanishes(ch, (2, 3, 5, 1, 0, 0))
    assert not _vanishes(ch, (1, 2, 1, 1, 1, 1))
    assert not _vanishes(ch, (0, 3, 5, 0, 1, 0))


def test_singular_locus_empty():
    codim1, flag = singular_locus(DIdeal(3, ds(3)))
    assert codim1 == [] and flag is False


def test_singular_locus_log():
    x, d = one_var()
    codim1, flag = singular_locus(DIdeal(1, [x * d * d + d]))
    assert [f.to_str() for f in codim1] == ["x1"]
    assert flag is False


def test_singular_locus_gkz_reg(gkz_reg):
    codim1, flag = singular_locus(gkz_reg)
    assert sorted(f.to_str() for f in codim1) == ["x1", "x2^2 - 4*x1*x3", "x3"]
    assert flag is False


def test_singular_locus_gkz_irr(gkz_irr):
    sing = singular_locus(gkz_irr)
    assert sorted(f.to_str() for f in sing.codim1) == ["x1", "x2", "x3"]
    assert sing.may_have_deeper is True
    # every deeper stratum lies inside V(x1, x2) or V(x2, x3)
    on_12, on_23 = (0, 0, 5), (3, 0, 0)
    hit = [all(g.evaluate(p) == 0 for g in s) for s in sing.deeper for p in (on_12, on_23)]
    assert any(hit)
    generic = (1, 0, 1)
    assert not any(all(g.evaluate(generic) == 0 for g in s) for s in sing.deeper)


def test_pfaffian_exponential():
    (d,) = ds(1)
    P = pfaffian_system(DIdeal(1, [d - 1]))
    assert P.rank == 1
    assert P.matrices == [[[rf(1, MultiPoly.one(1))]]]


def test_pfaffian_first_order():
    x, d = xs(2), ds(2)
    P = pfaffian_system(DIdeal(2, [d[0] - x[1], d[1] - x[0]]))
    X1, X2 = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    assert P.matrices == [[[rf(2, X2)]], [[rf(2, X1)]]]
    assert P.is_integrable()


def test_pfaffian_log():
    x, d = one_var()
    P = pfaffian_system(DIdeal(1, [x * d * d + d]))
    X = MultiPoly.variable(1, 0)
    zero, one = rf(1, MultiPoly.zero(1)), rf(1, MultiPoly.one(1))
    assert P.basis == [(0,), (1,)]
    assert P.matrices == [[[zero, one], [zero, RationalFunction(-MultiPoly.one(1), X)]]]


def test_pfaffian_infinite_rank():
    d = ds(2)
    with pytest.raises(NotFiniteRank, match="not of finite rank"):
        pfaffian_system(DIdeal(2, [d[0]]))


@pytest.mark.parametrize("fixture", ["gkz_reg", "gkz_irr", "exp_pole"])
def test_pfaffian_integrable(fixture, request):
    P = pfaffian_system(request.getfixturevalue(fixture))
    assert P.integrability_defects() == []


def test_inconsistent_first_order_system_has_rank_zero():
    # [d1 - x2, d2 + x1] = 2, so the ideal is the whole ring
    x, d = xs(2), ds(2)
    assert holonomic_rank(DIdeal(2, [d[0] - x[1], d[1] + x[0]])) == 0


@st.composite
def scalar_operators(draw):
    order = draw(st.integers(1, 3))
    coeffs = [draw(st.dictionaries(st.integers(0, 2), small_rationals, max_size=3))
              for _ in range(order + 1)]
    lead = draw(st.integers(0, 2))
    coeffs[order][lead] = draw(small_rationals.filter(lambda c: c != 0))
    terms = {}
    for k, c in enumerate(coeffs):
        for e, v in c.items():
            if v:
                terms[((e,), (k,))] = v
    return WeylElement(1, terms), order


@settings(max_examples=60, deadline=None)
@given(scalar_operators())
def test_rank_equals_order(data):
    P, order = data
    assert holonomic_rank(DIdeal(1, [P])) == order


@settings(max_examples=10, deadline=None)
@given(small_rationals, small_rationals)
def test_rank_invariant_under_zero_weight(b1, b2):
    from conftest import gkz_irregular
    I = gkz_irregular((b1, b2))
    assert holonomic_rank(initial_ideal(I, WeightVector.zero(3))) == holonomic_rank(I)
