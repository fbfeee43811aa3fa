from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from engine.contour import pseries_to_bilaurent
from engine.errors import IncompatibleRegions, InvalidCombination, NotInvertibleInRegion
from engine.kernels import REGION_MINUS, REGION_PLUS, RationalFunction
from engine.ring import LaurentPoly
from engine.series import BiLaurentSeries, FormalDelta, PSeries, bracket_extract, delta_substitute
from engine.theta import theta_truncated

z, w = LaurentPoly.symbol("z"), LaurentPoly.symbol("w")


def test_pseries_inverse():
    s = PSeries({0: Fraction(1), 1: Fraction(-1)}, 6)
    inv = s.inverse()
    assert all(inv.coefficient(k) == 1 for k in range(7))
    assert s * inv == PSeries.constant(Fraction(1), 6)


def test_pseries_inverse_with_valuation():
    s = PSeries({2: Fraction(3)}, 5)
    inv = s.inverse()
    assert inv.coefficient(-2) == Fraction(1, 3)


def test_zero_pseries_is_not_invertible():
    with pytest.raises(NotInvertibleInRegion):
        PSeries({}, 3).inverse()


def test_coefficient_beyond_order():
    with pytest.raises(ValueError):
        PSeries.constant(1, 2).coefficient(3)


def test_geometric_expansion_in_both_regions():
    f = RationalFunction(LaurentPoly.one(), z - w)
    plus = f.expand(REGION_PLUS, 6)
    # 1/(z - w) = sum_k w^k / z^(k+1) for |z| > |w|
    assert plus.coefficient(-1, 0).coefficient(0) == 1
    assert plus.coefficient(-3, 2).coefficient(0) == 1
    assert plus.coefficient(1, -2).is_zero()

    minus = f.expand(REGION_MINUS, 6)
    # -sum_k z^k / w^(k+1) for |w| > |z|
    assert minus.coefficient(0, -1).coefficient(0) == -1
    assert minus.coefficient(2, -3).coefficient(0) == -1
    assert minus.coefficient(-1, 0).is_zero()


def test_delta_is_difference_of_expansions():
    # delta(w/z) = z/(z - w) expanded at |z| > |w| minus at |w| > |z|
    f = RationalFunction(z, z - w)
    difference = f.expand(REGION_PLUS, 5) - f.expand(REGION_MINUS, 5)
    delta = FormalDelta(Fraction(1)).series(5)
    assert difference.first_mismatch(delta) is None


def test_delta_times_series():
    s = BiLaurentSeries.from_poly(z ** 2 + 3, 6)
    product = FormalDelta(Fraction(2)).times(s)
    # entry (a, b) is 2^(-b) times the z^(a+b) coefficient
    assert product.coefficient(3, -1).coefficient(0) == 2
    assert product.coefficient(1, 1).coefficient(0) == Fraction(1, 2)
    assert product.coefficient(0, 0).coefficient(0) == 3


def test_delta_times_w_series_is_incompatible():
    with pytest.raises(IncompatibleRegions):
        FormalDelta().times(BiLaurentSeries.from_poly(w, 4))


def test_first_mismatch_reports_key():
    a = BiLaurentSeries.from_poly(z + w, 4)
    b = BiLaurentSeries.from_poly(z + 2 * w, 4)
    key, lhs, rhs = a.first_mismatch(b)
    assert key == (0, 1, 0)
    assert (lhs, rhs) == (1, 2)


@given(st.integers(-3, 3), st.sampled_from([Fraction(1), Fraction(2), Fraction(-1, 3)]))
def test_delta_substitute_moves_the_series_onto_the_support(n, x0):
    # delta(w/(x0 z)) w^n = delta(w/(x0 z)) (x0 z)^n
    moved = delta_substitute(FormalDelta(x0), BiLaurentSeries.from_poly(w ** n, 6))
    expected = FormalDelta(x0).times(BiLaurentSeries.from_poly(z ** n * x0 ** n, 6))
    assert moved.first_mismatch(expected) is None


def test_delta_substitute_of_constants_and_theta():
    delta = FormalDelta()
    one = BiLaurentSeries.constant(Fraction(1), 5)
    assert delta_substitute(delta, one).first_mismatch(delta.times(one)) is None
    in_w = pseries_to_bilaurent(theta_truncated(w * Fraction(3, 2), 2), 6)
    in_z = pseries_to_bilaurent(theta_truncated(z * Fraction(3, 2), 2), 6)
    assert delta_substitute(delta, in_w).first_mismatch(delta.times(in_z)) is None


def test_delta_substitute_needs_a_series_in_w():
    with pytest.raises(IncompatibleRegions):
        delta_substitute(FormalDelta(), BiLaurentSeries.from_poly(z * w, 4))


def test_bracket_extract():
    delta = FormalDelta().series(5)
    assert bracket_extract(delta, "z<0 & w<0") == {}
    assert sorted(bracket_extract(delta, "z<=0")) == [(-k, k) for k in range(5, -1, -1)]
    # 1/(z - w) at |z| > |w| is sum_k w^k / z^(k+1)
    expansion = RationalFunction(LaurentPoly.one(), z - w).expand(REGION_PLUS, 6)
    cells = bracket_extract(expansion, "all")
    assert {(-1, 0), (-3, 2)} <= set(cells)
    assert all(a == -b - 1 for a, b in cells)
    assert all(c.coefficient(0) == 1 for c in cells.values())
    assert bracket_extract(expansion, "z<=0 & w<0") == {}
    with pytest.raises(InvalidCombination):
        bracket_extract(expansion, "w>1")
