from fractions import Fraction

import mpmath
import pytest

from engine.errors import CoincidentRoots, InvalidCombination
from engine.kclass import KClass
from engine.ring import LaurentPoly, Monomial
from engine.theta import AutomorphyFactor, ThetaRatio
from engine.pushforward import (
    contour_push,
    delta_push,
    embed_push,
    embed_push_automorphy,
    exact_value,
    lemma_integral_check,
    proj_bundle_push,
    proj_bundle_terms,
    quadrature_push,
)

z = LaurentPoly.symbol("z")
U1, U2 = Monomial.symbol("u1"), Monomial.symbol("u2")

VALUES = {
    "p": Fraction(1, 9),
    "q1": Fraction(11, 10),
    "q2": Fraction(107, 100),
    "u1": Fraction(4, 5),
    "u2": Fraction(9, 10),
    "x1": Fraction(17, 20),
}


def _section():
    return ThetaRatio.theta(z * LaurentPoly.symbol("x1"))


def test_residue_sum_equals_contour_form():
    bundle = KClass.of(U1, U2)
    exact = proj_bundle_push(_section(), [U1, U2], VALUES, 3)
    contour = contour_push(_section(), bundle, VALUES, 3)
    assert exact == contour
    assert not exact.is_zero()


def test_coincident_roots():
    with pytest.raises(CoincidentRoots):
        proj_bundle_push(_section(), [U1, U1], VALUES, 2)


def test_section_with_pole_is_rejected():
    with pytest.raises(InvalidCombination):
        proj_bundle_terms(ThetaRatio.theta(z).inverse(), [U1])


def test_quadrature_agrees_with_closed_form():
    point = {k: mpmath.mpf(v.numerator) / v.denominator for k, v in VALUES.items()}
    numeric = quadrature_push(_section(), KClass.of(U1, U2), point, points=512)
    exact = exact_value(proj_bundle_terms(_section(), [U1, U2]), point)
    assert abs(numeric - exact) < mpmath.mpf("1e-9")


def test_embedding_pushforward():
    bundle = KClass.of(Monomial.symbol("z"))
    pushed = embed_push(ThetaRatio(1), bundle)
    assert pushed == ThetaRatio.theta(z ** -1)
    assert embed_push_automorphy(ThetaRatio(1), bundle, "z") == AutomorphyFactor(1, -LaurentPoly.symbol("p"))


def test_embedding_needs_a_bundle():
    with pytest.raises(InvalidCombination):
        embed_push(ThetaRatio(1), -KClass.of(U1))


def test_kernel_lemma(params):
    report = lemma_integral_check(params.values(), 3)
    assert report.status == "PASS", report.notes
    assert report.poles == sorted([Fraction(1), 1 / params.q])


def test_delta_push_of_a_line_is_a_geometric_series():
    series = delta_push(KClass.of(U1), VALUES, 2, 4)
    assert series.coefficient(0, 0).coefficient(0) == 1
    assert series.coefficient(0, -2).coefficient(0) == Fraction(16, 25)
    assert series.coefficient(0, 1).coefficient(0) == 0
