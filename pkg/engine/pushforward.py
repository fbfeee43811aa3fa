"""
Elliptic pushforwards.

Sections are ThetaRatios in one slot variable (z by default). Exact results
are p-series at specialized parameters; the trapezoidal quadrature on the
two circles |z| = 1 and |z| = |p| is a numerical oracle for them.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Union

import mpmath

from engine.contour import annulus_residues, evaluate, expand_difference, expand_on_torus
from engine.errors import CoincidentRoots, InvalidCombination, NotDivisible
from engine.kclass import KClass
from engine.kernels import RationalFunction, koszul_diagonal, p_zero
from engine.ring import LaurentPoly, Monomial, divide_exact
from engine.series import BiLaurentSeries, PSeries
from engine.theta import NOME, AutomorphyFactor, ThetaRatio, theta_of_class, theta_truncated

Root = Union[LaurentPoly, Monomial]

PASS, FAIL = "PASS", "FAIL"


def _numeric(values: Mapping[str, Fraction]) -> Dict[str, Fraction]:
    return {s: v for s, v in values.items() if s != NOME}


def constant_series(ratio: ThetaRatio, values: Mapping[str, Fraction], order: int) -> PSeries:
    """A ratio free of z and w as a p-series at the given values"""
    expanded = expand_on_torus(ratio.specialize(_numeric(values)), order, 0, values[NOME])
    return expanded.coefficient(0, 0)


def _check_section(sigma: ThetaRatio, var: str):
    for arg, e in list(sigma.thetas.items()) + list(sigma.binomials.items()):
        if e < 0 and var in arg.symbols():
            raise InvalidCombination(f"section has a pole along {arg} in {var}")


# ==================== Regular embeddings ====================


def embed_push(sigma: ThetaRatio, bundle: KClass) -> ThetaRatio:
    """iota_*(sigma) = sigma * theta(V^dual) for a zero locus of a section of V"""
    if any(m < 0 for _, m in bundle.items()):
        raise InvalidCombination(f"{bundle} is not the class of a vector bundle")
    return sigma * theta_of_class(bundle.dual())


def embed_push_automorphy(sigma: ThetaRatio, bundle: KClass, var: str) -> AutomorphyFactor:
    return embed_push(sigma, bundle).automorphy(var)


# ==================== Projective bundles ====================


def proj_bundle_terms(sigma: ThetaRatio, roots: Sequence[Root], var: str = "z") -> List[ThetaRatio]:
    """sigma(L_i) / prod_(j != i) theta(L_j / L_i), one term per root"""
    _check_section(sigma, var)
    lifted = [LaurentPoly.lift(r) for r in roots]
    terms = []
    for i, root in enumerate(lifted):
        term = sigma.substitute({var: root})
        for j, other in enumerate(lifted):
            if j != i:
                term = term / ThetaRatio.theta(other * root ** -1)
        terms.append(term)
    return terms


def _check_distinct(roots: Sequence[Root], values: Mapping[str, Fraction]):
    seen: Dict[Fraction, LaurentPoly] = {}
    for root in roots:
        root = LaurentPoly.lift(root)
        value = root.specialize(values)
        if value in seen:
            raise CoincidentRoots(f"roots {seen[value]} and {root} both specialize to {value}")
        seen[value] = root


def proj_bundle_push(
    sigma: ThetaRatio, roots: Sequence[Root], values: Mapping[str, Fraction], order: int, var: str = "z"
) -> PSeries:
    _check_distinct(roots, values)
    total = PSeries({}, order)
    for term in proj_bundle_terms(sigma, roots, var):
        total = total + constant_series(term, values, order)
    return total.truncate(order)


# ==================== Contour form ====================


def contour_integrand(sigma: ThetaRatio, bundle: KClass, var: str = "z") -> ThetaRatio:
    """sigma(z) / theta(E/z) / z, integrated against dz/(2 pi i)"""
    _check_section(sigma, var)
    x = Monomial.symbol(var)
    return sigma * theta_of_class(-bundle, x.inverse()) * LaurentPoly.monomial(x.inverse())


def contour_push(
    sigma: ThetaRatio, bundle: KClass, values: Mapping[str, Fraction], order: int, var: str = "z"
) -> PSeries:
    """
    The integral of sigma(z)/theta(E/z) over |z| = 1 minus |z| = |p|, as the
    sum of residues in the annulus |p| < |z| <= 1. E may be a virtual class.
    """
    total = PSeries({}, order)
    for residue in annulus_residues(contour_integrand(sigma, bundle, var), var, values):
        total = total + residue.series(values, order)
    return total.truncate(order)


def quadrature_push(
    sigma: ThetaRatio,
    bundle: KClass,
    point: Mapping[str, object],
    points: int = 4096,
    var: str = "z",
):
    """Trapezoidal rule on both circles; point assigns numbers to p and every other symbol"""
    ratio = sigma * theta_of_class(-bundle, Monomial.symbol(var).inverse())
    nome = mpmath.mpmathify(point[NOME])

    def mean_on(radius):
        samples = (
            evaluate(ratio, {**point, var: radius * mpmath.expj(2 * mpmath.pi * k / points)})
            for k in range(points)
        )
        return mpmath.fsum(samples) / points

    return mean_on(mpmath.mpf(1)) - mean_on(abs(nome))


def exact_value(terms: Sequence[ThetaRatio], point: Mapping[str, object]):
    """Closed-form numerical value of a sum of ratios"""
    return mpmath.fsum(evaluate(term, point) for term in terms)


# ==================== Delta form ====================


def delta_push(
    bundle: KClass, values: Mapping[str, Fraction], order: int, window: int, var: str = "w"
) -> BiLaurentSeries:
    """pi_*[delta(taut/w)] = 1/theta(E/w) |_(1-p)"""
    ratio = theta_of_class(-bundle, Monomial.symbol(var).inverse())
    return expand_difference(ratio.specialize(_numeric(values)), [var], order, window, values[NOME])


# ==================== The zeta kernel lemma ====================


@dataclass
class LemmaReport:
    status: str = PASS
    poles: List[Fraction] = field(default_factory=list)
    residue: Optional[ThetaRatio] = None
    residue_at_p_zero: Optional[RationalFunction] = None
    notes: List[str] = field(default_factory=list)

    def fail(self, note: str) -> "LemmaReport":
        self.status = FAIL
        self.notes.append(note)
        return self


def _divide_series(num: PSeries, den: PSeries, order: int) -> PSeries:
    """Exact p-adic quotient; raises NotDivisible when a coefficient does not divide"""
    quotient: Dict[int, LaurentPoly] = {}
    for k in range(order + 1):
        rest = num.coefficient(k)
        for i, q in quotient.items():
            rest = rest - q * den.coefficient(k - i)
        quotient[k] = divide_exact(LaurentPoly.lift(rest), LaurentPoly.lift(den.coefficient(0)))
    return PSeries(quotient, order)


def zeta_minus_one_divisible(order: int) -> bool:
    """
    theta(xL1) theta(xL2) - theta(x) theta(xL1L2) is divisible by
    theta(L1) theta(L2) up to p^order, with L1 and L2 formal.
    """
    x, l1, l2 = (Monomial.symbol(s) for s in ("x", "L1", "L2"))
    numerator = theta_truncated(x * l1, order) * theta_truncated(x * l2, order)
    numerator = numerator - theta_truncated(x, order) * theta_truncated(x * l1 * l2, order)
    divisor = theta_truncated(l1, order) * theta_truncated(l2, order)
    try:
        _divide_series(numerator, divisor, order)
    except NotDivisible:
        return False
    return True


def zeta_elliptic(var: str = "x") -> ThetaRatio:
    return theta_of_class(-koszul_diagonal(), Monomial.symbol(var))


def lemma_integral_check(values: Mapping[str, Fraction], order: int) -> LemmaReport:
    """
    The kernel zeta(x) = theta(xL1)theta(xL2)/(theta(x)theta(xq)): in the annulus
    its poles sit at 1 and 1/q, its residue at 1 is -theta(L1)theta(L2)/theta(q),
    and zeta - 1 is divisible by theta(L1)theta(L2).
    """
    report = LemmaReport()
    q = values["q1"] * values["q2"]
    residues = annulus_residues(zeta_elliptic(), "x", values)
    report.poles = sorted(r.location.specialize(values) for r in residues)
    if set(report.poles) != {Fraction(1), 1 / q} or len(report.poles) != 2:
        report.fail(f"poles in the annulus are {report.poles}, expected 1 and 1/q")

    l1 = Monomial.symbol("L1")
    q_mono = Monomial({"q1": 1, "q2": 1})
    expected = -(theta_of_class(KClass.of(l1, q_mono / l1)) / ThetaRatio.theta(q_mono))
    at_one = [r for r in residues if r.location == 1]
    if not at_one:
        return report.fail("no pole at x = 1")
    report.residue = at_one[0].value
    if report.residue != expected:
        report.fail(f"residue at 1 is {report.residue}, expected {expected}")

    report.residue_at_p_zero = p_zero(report.residue)
    l1_poly, l2_poly = LaurentPoly.symbol("L1"), LaurentPoly.monomial(q_mono / l1)
    q_poly = LaurentPoly.monomial(q_mono)
    if report.residue_at_p_zero != RationalFunction(-(1 - l1_poly) * (1 - l2_poly), 1 - q_poly):
        report.fail(f"residue at p = 0 is {report.residue_at_p_zero}")

    if not zeta_minus_one_divisible(order):
        report.fail(f"zeta - 1 is not divisible by theta(L1) theta(L2) up to p^{order}")
    return report
