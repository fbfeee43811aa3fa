from fractions import Fraction
from functools import lru_cache

import mpmath
import pytest
from hypothesis import given, strategies as st

from engine.contour import annulus_residues, contour_integral, evaluate, expand_on_torus
from engine.errors import GenericityViolation, PoleOnContour
from engine.ring import LaurentPoly
from engine.theta import ThetaRatio

z, w = LaurentPoly.symbol("z"), LaurentPoly.symbol("w")
NOME = Fraction(1, 9)


def test_torus_expansion_of_inverse_theta():
    ratio = ThetaRatio.theta(z * Fraction(1, 2)).inverse()
    series = expand_on_torus(ratio, 2, 6, NOME)
    for n in range(0, 7):
        assert series.coefficient(n, 0).coefficient(0) == Fraction(1, 2 ** n)
    assert series.coefficient(-1, 0).coefficient(0) == 0
    # 1/theta(x) = (1 - 2p + p x + p/x + ...) / (1 - x)
    assert series.coefficient(-1, 0).coefficient(1) == 2


def test_pole_on_the_torus():
    with pytest.raises(PoleOnContour):
        expand_on_torus(ThetaRatio.binomial(z, -1), 2, 4, NOME)


def test_theta_pole_outside_fundamental_range():
    with pytest.raises(GenericityViolation):
        expand_on_torus(ThetaRatio.theta(z * Fraction(1, 20)).inverse(), 2, 4, NOME)


def test_residue_of_inverse_theta_at_one():
    residues = annulus_residues(ThetaRatio.theta(z).inverse(), "z", {"p": Fraction(1, 10)})
    assert len(residues) == 1
    assert residues[0].location == 1
    assert residues[0].value == ThetaRatio(-1)


def test_residues_match_contour_integrals():
    ratio = ThetaRatio.theta(z * 2).inverse() * ThetaRatio.theta(z * Fraction(5, 4))
    point = {"p": mpmath.mpf(1) / 9}
    inner, outer = Fraction(3, 10), Fraction(7, 10)
    residues = annulus_residues(ratio, "z", {"p": NOME}, inner=inner, outer=outer)
    assert [r.location for r in residues] == [LaurentPoly.constant(Fraction(1, 2))]
    exact = mpmath.fsum(evaluate(r.value, point) for r in residues)
    numeric = contour_integral(ratio, "z", mpmath.mpf(outer.numerator) / outer.denominator, point) - contour_integral(
        ratio, "z", mpmath.mpf(inner.numerator) / inner.denominator, point
    )
    assert abs(numeric - exact) < mpmath.mpf("1e-10")


@lru_cache(maxsize=None)
def _mixed_expansion():
    # 1/((1 - z/2)(1 - w/3)(1 - 3zw)): no half-plane holds all three pole steps
    ratio = (
        ThetaRatio.binomial(z * Fraction(1, 2), -1)
        * ThetaRatio.binomial(w * Fraction(1, 3), -1)
        * ThetaRatio.binomial(z * w * 3, -1)
    )
    return expand_on_torus(ratio, 0, 4, NOME)


@given(st.integers(-3, 3), st.integers(-3, 3))
def test_torus_expansion_with_poles_in_every_direction(a, b):
    start = max(1, -a, -b)
    expected = -Fraction(18, 17) * Fraction(1, 2) ** a * Fraction(1, 3) ** b * Fraction(1, 18) ** start
    assert _mixed_expansion().coefficient(a, b).coefficient(0) == expected
