from fractions import Fraction

import pytest
from hypothesis import given, strategies as st
from sympy import QQ, Poly, Rational

from engine.errors import PoleOnContour, UnsupportedPoleGeometry
from engine.univariate import X, circle_inverse, laurent_on_circle


def poly(expr):
    return Poly(expr, X, domain=QQ)


@given(st.integers(-6, 6))
def test_circle_inverse_splits_inner_and_outer_poles(n):
    # 1/((1 - X/2)(1 - 3X)) on |X| = 1
    coeffs = circle_inverse([(Fraction(1, 2), 1, 1), (Fraction(3), 1, 1)], -6, 6)
    expected = -Fraction(1, 5) / 2 ** n if n >= 0 else -Fraction(6, 5) * Fraction(3) ** n
    assert coeffs.get(n, 0) == expected


def test_circle_inverse_with_multiplicity():
    coeffs = circle_inverse([(Fraction(1, 2), 1, 2)], -3, 4)
    assert [coeffs.get(n, 0) for n in range(5)] == [Fraction(n + 1, 2 ** n) for n in range(5)]
    assert all(coeffs.get(n, 0) == 0 for n in range(-3, 0))


@given(st.integers(-5, 5))
def test_laurent_on_circle_of_a_rational_function(n):
    # X / ((X - 2)(X - 1/2))
    coeffs = laurent_on_circle(poly(X), poly(X ** 2 - Rational(5, 2) * X + 1), -5, 5)
    m = n - 1
    expected = -Fraction(1, 3) / 2 ** m if m >= 0 else -Fraction(4, 3) * Fraction(2) ** m
    assert coeffs.get(n, 0) == expected


def test_laurent_on_circle_with_a_pole_at_zero():
    coeffs = laurent_on_circle(poly(1), poly(X - X ** 2 / 2), -4, 4)
    assert coeffs == {n: Fraction(1, 2 ** (n + 1)) for n in range(-1, 5)}


def test_laurent_on_circle_rejects_bad_denominators():
    with pytest.raises(PoleOnContour):
        laurent_on_circle(poly(1), poly(X ** 2 + 1), -2, 2)
    with pytest.raises(UnsupportedPoleGeometry):
        laurent_on_circle(poly(1), poly(X ** 2 - 3 * X + 1), -2, 2)
