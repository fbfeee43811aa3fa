from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from engine.errors import MixedVariableFactor, NotInvertibleInRegion
from engine.kclass import KClass
from engine.ring import LaurentPoly, Monomial
from engine.series import PSeries
from engine.theta import AutomorphyFactor, ThetaRatio, theta_coefficients, theta_of_class, theta_truncated

z, q1, p = LaurentPoly.symbol("z"), LaurentPoly.symbol("q1"), LaurentPoly.symbol("p")

ORDER = 8


def _euler_cubed(order: int) -> PSeries:
    product = PSeries.constant(Fraction(1), order)
    for s in range(1, order + 1):
        product = product * PSeries({0: Fraction(1), s: Fraction(-1)}, order)
    return product ** 3


def test_triple_product():
    # (p; p)^3 theta(z) = sum_n (-1)^n p^(n(n-1)/2) z^n
    lhs = theta_truncated(z, ORDER) * _euler_cubed(ORDER)
    expected = {}
    for n in range(-ORDER - 1, ORDER + 2):
        k = n * (n - 1) // 2
        if k <= ORDER:
            expected[k] = expected.get(k, LaurentPoly.zero()) + (1 if n % 2 == 0 else -1) * z ** n
    assert lhs == PSeries(expected, ORDER)


def test_low_order_coefficients():
    coeffs = theta_coefficients(z, 1)
    assert coeffs[0] == 1 - z
    assert coeffs[1] == -((1 - z) ** 3) * z ** -1


def test_inversion():
    inverted = theta_truncated(z ** -1, ORDER)
    expected = theta_truncated(z, ORDER).map(lambda v: -v * z ** -1)
    assert inverted == expected


def test_quasi_periodicity_of_truncation():
    shifted = theta_truncated(z * p, ORDER)
    expected = theta_truncated(z, ORDER).map(lambda v: -v * z ** -1)
    assert shifted == expected


def test_canonical_form():
    assert ThetaRatio.theta(z ** -1) == ThetaRatio(-(z ** -1), {z: 1})
    assert ThetaRatio.theta(z * p) == ThetaRatio(-(z ** -1), {z: 1})
    assert ThetaRatio.theta(LaurentPoly.one()).is_zero()
    with pytest.raises(NotInvertibleInRegion):
        ThetaRatio(1, {LaurentPoly.one(): -1})


def test_theta_of_class_is_multiplicative():
    cls = KClass.of(Monomial.symbol("q1"), Monomial.symbol("q2"))
    assert theta_of_class(cls) == ThetaRatio.theta(q1) * ThetaRatio.theta(LaurentPoly.symbol("q2"))
    assert theta_of_class(-cls) == theta_of_class(cls).inverse()


def test_automorphy_factors():
    assert ThetaRatio.theta(z).automorphy("z") == AutomorphyFactor(1, LaurentPoly.constant(-1))
    ratio = ThetaRatio.theta(z * q1) / ThetaRatio.theta(z)
    assert ratio.automorphy("z") == AutomorphyFactor(0, q1)
    assert ThetaRatio.theta(z ** -1).automorphy("z") == AutomorphyFactor(1, -p)


def test_automorphy_rejects_binomials():
    with pytest.raises(MixedVariableFactor):
        ThetaRatio.binomial(z).automorphy("z")


@given(st.integers(-3, 3), st.integers(-3, 3))
def test_substitution_merges_equal_arguments(a, b):
    w = LaurentPoly.symbol("w")
    ratio = ThetaRatio.theta(z * q1, a) * ThetaRatio.theta(w * q1, b)
    assert ratio.substitute({"w": z}) == ThetaRatio.theta(z * q1, a + b)


def test_specialization_merges_equal_arguments():
    q2 = LaurentPoly.symbol("q2")
    ratio = ThetaRatio.theta(z * q1) / ThetaRatio.theta(z * q2)
    assert ratio.specialize({"q1": Fraction(11, 10), "q2": Fraction(11, 10)}) == ThetaRatio(1)


def test_inverse_merges_the_binomial_prefactor():
    ratio = ThetaRatio(1 - z, binomials={z: 1})
    assert ratio.inverse() == ThetaRatio.binomial(z, -2)
