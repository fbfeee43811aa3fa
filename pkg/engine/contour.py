"""
Expansions of specialized theta ratios on the unit torus |z| = |w| = 1,
the difference operator F -> F(x) - F(x p), residues inside the fundamental
annulus |p| < |x| <= 1, and numerical contour integrals for cross-checks.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as cartesian
from math import comb, gcd
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import mpmath
from sympy import QQ, Integer, Poly, cancel, fraction, symbols as sympy_symbols

from engine.errors import (
    GenericityViolation,
    NotInvertibleInRegion,
    PoleOnContour,
    UnassignedSymbol,
    UnsupportedPoleGeometry,
)
from engine.ring import LaurentPoly, Monomial, to_rational
from engine.series import BiLaurentSeries, PSeries, RegionTag, UNIT_CIRCLE, series_mul
from engine.theta import NOME, ThetaRatio, as_term, theta_truncated
from engine.univariate import circle_inverse, laurent_on_circle, laurent_split


TORUS_TAGS = {"z": RegionTag(UNIT_CIRCLE), "w": RegionTag(UNIT_CIRCLE)}

PoleBinomial = Tuple[Fraction, int, int, int]  # (c, a, b, m) for (1 - c z^a w^b)^m


# ==================== Helpers ====================


def _spectral_parts(arg: LaurentPoly) -> Tuple[Fraction, int, int, int]:
    """c, z exponent, w exponent, p exponent of a specialized argument"""
    c, m = arg.single_term()
    stray = [s for s in m.symbols() if s not in ("z", "w", NOME)]
    if stray:
        raise UnassignedSymbol(f"symbols {stray} must be specialized before expansion")
    return c, m.exponent("z"), m.exponent("w"), m.exponent(NOME)


def pseries_to_bilaurent(series: PSeries, window: int) -> BiLaurentSeries:
    terms: Dict[Tuple[int, int, int], Fraction] = {}
    for k, poly in series.coeffs.items():
        for mono, c in LaurentPoly.lift(poly).items():
            _, a, b, _ = _spectral_parts(LaurentPoly.monomial(mono, c))
            key = (a, b, k)
            terms[key] = terms.get(key, Fraction(0)) + c
    return BiLaurentSeries(terms, window, series.order, TORUS_TAGS, finite=True)


def inverse_elliptic_part(arg: LaurentPoly, order: int) -> PSeries:
    """
    1/P(x) with P(x) = prod_{s>=1} (1 - p^s x)(1 - p^s/x)/(1 - p^s)^2, so that
    theta(x) = (1 - x) P(x). Each p-coefficient is a Laurent polynomial in x.
    """
    x = as_term(arg)
    inv_x = x ** -1
    coeffs: List[LaurentPoly] = [LaurentPoly.zero()] * (order + 1)
    coeffs[0] = LaurentPoly.one()
    for s in range(1, order + 1):
        # divide by (1 - p^s x): G[e] = F[e] + x G[e - s]
        for factor in (x, inv_x):
            for e in range(s, order + 1):
                coeffs[e] = coeffs[e] + factor * coeffs[e - s]
        # multiply by (1 - p^s)^2 = 1 - 2p^s + p^2s
        nxt = list(coeffs)
        for e in range(s, order + 1):
            nxt[e] = nxt[e] - 2 * coeffs[e - s]
            if e >= 2 * s:
                nxt[e] = nxt[e] + coeffs[e - 2 * s]
        coeffs = nxt
    return PSeries(dict(enumerate(coeffs)), order)


def geometric_series(arg: LaurentPoly, order: int) -> PSeries:
    """1/(1 - arg) for an argument carrying a positive power of p"""
    c, m = arg.single_term()
    k = m.exponent(NOME)
    rest = LaurentPoly.monomial(m.without(NOME), c)
    coeffs: Dict[int, LaurentPoly] = {}
    n = 0
    while n * k <= order:
        coeffs[n * k] = rest ** n
        n += 1
    return PSeries(coeffs, order)


# ==================== Pole geometry ====================


def _primitive(a: int, b: int) -> Tuple[Tuple[int, int], int, bool]:
    """Direction (a', b') with first nonzero entry positive, multiplicity g, and whether it was flipped"""
    g = gcd(abs(a), abs(b))
    da, db = a // g, b // g
    flipped = da < 0 or (da == 0 and db < 0)
    if flipped:
        da, db = -da, -db
    return (da, db), g, flipped


def _complete_basis(v: Tuple[int, int]) -> Tuple[int, int]:
    """u with det [v u] = 1"""
    a, b = v
    # extended gcd: a*x + b*y = 1
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    return (-old_t, old_s)


def _weight_for(steps: Sequence[Tuple[Fraction, int, int, int]]) -> Optional[Tuple[int, int]]:
    """A small integer weight strictly positive on every step direction, if one exists"""
    bound = 2 * max(max(abs(a), abs(b)) for _, a, b, _ in steps) + 1
    candidates = sorted(
        ((i, j) for i in range(-bound, bound + 1) for j in range(-bound, bound + 1)),
        key=lambda v: (abs(v[0]) + abs(v[1]), v),
    )
    for i, j in candidates:
        if all(i * a + j * b > 0 for _, a, b, _ in steps):
            return (i, j)
    return None


def _cone_inverse(poles: Sequence[PoleBinomial], window: int, order: int = 0) -> BiLaurentSeries:
    """
    Inverse for pole directions that are not a unimodular pair: every binomial
    is oriented so that |c| < 1 and the geometric series are multiplied
    together, graded by a weight positive on all of them.
    """
    scalar = Fraction(1)
    shift = [0, 0]
    steps: List[Tuple[Fraction, int, int, int]] = []
    for c, a, b, m in poles:
        if abs(c) == 1:
            raise PoleOnContour(f"1/(1 - {c} z^{a} w^{b}) has a pole on the unit torus")
        if abs(c) > 1:
            # (1 - c X) = -c X (1 - X^-1 / c)
            scalar *= (-c) ** (-m)
            shift[0] -= a * m
            shift[1] -= b * m
            c, a, b = 1 / c, -a, -b
        steps.append((c, a, b, m))
    weight = _weight_for(steps)
    if weight is None:
        return _mixed_inverse(poles, window, order)

    def grade(i: int, j: int) -> int:
        return weight[0] * i + weight[1] * j

    top = max(grade(i - shift[0], j - shift[1]) for i in (-window, window) for j in (-window, window))
    series: Dict[Tuple[int, int], Fraction] = {(0, 0): Fraction(1)}
    for c, a, b, m in steps:
        step = grade(a, b)
        factor: Dict[Tuple[int, int], Fraction] = {}
        k = 0
        while k * step <= top:
            factor[(k * a, k * b)] = comb(m + k - 1, k) * c ** k
            k += 1
        nxt: Dict[Tuple[int, int], Fraction] = {}
        for (i1, j1), x in series.items():
            for (i2, j2), y in factor.items():
                key = (i1 + i2, j1 + j2)
                if grade(*key) <= top:
                    nxt[key] = nxt.get(key, Fraction(0)) + x * y
        series = nxt
    terms: Dict[Tuple[int, int, int], Fraction] = {}
    for (i, j), v in series.items():
        i, j = i + shift[0], j + shift[1]
        if abs(i) <= window and abs(j) <= window:
            terms[(i, j, 0)] = scalar * v
    return BiLaurentSeries(terms, window, order, TORUS_TAGS)


def _mixed_inverse(poles: Sequence[PoleBinomial], window: int, order: int = 0) -> BiLaurentSeries:
    """
    Inverse for pole directions no half-plane contains. The expansion is taken
    in z on |z| = 1 first, with coefficients rational in w, and each
    coefficient is then expanded on |w| = 1. For w on the circle the roots of
    1 - c w^b z^a stay on one side of |z| = 1, fixed by |c|.
    """
    z, w = sympy_symbols("z w")
    field = QQ.frac_field(w)
    scalar = Fraction(1)
    shift = [0, 0]
    regular, polar, in_w = Integer(1), Integer(1), Integer(1)
    for c, a, b, m in poles:
        if abs(c) == 1:
            raise PoleOnContour(f"1/(1 - {c} z^{a} w^{b}) has a pole on the unit torus")
        if a < 0:
            # (1 - c X) = -c X (1 - X^-1 / c)
            scalar *= (-c) ** (-m)
            shift[0] -= a * m
            shift[1] -= b * m
            c, a, b = 1 / c, -a, -b
        factor = (1 - to_rational(c) * z ** a * w ** b) ** m
        if a == 0:
            in_w *= factor
        elif abs(c) < 1:
            regular *= factor
        else:
            polar *= factor
    span = window + max(abs(shift[0]), abs(shift[1]))
    one = Poly(1, z, domain=field)
    in_z = laurent_split(one, Poly(regular, z, domain=field), Poly(polar, z, domain=field), -span, span)
    terms: Dict[Tuple[int, int, int], Fraction] = {}
    for i, coeff in in_z.items():
        i += shift[0]
        if abs(i) > window:
            continue
        num, den = fraction(cancel(coeff / in_w))
        for j, v in laurent_on_circle(Poly(num, w, domain=QQ), Poly(den, w, domain=QQ), -span, span).items():
            j += shift[1]
            if abs(j) <= window:
                terms[(i, j, 0)] = scalar * v
    return BiLaurentSeries(terms, window, order, TORUS_TAGS)


def torus_pole_inverse(poles: Sequence[PoleBinomial], window: int, order: int = 0) -> BiLaurentSeries:
    """
    Laurent expansion on the unit torus of 1/prod (1 - c z^a w^b)^m.

    Pole binomials are grouped by primitive direction. At most two directions
    forming a unimodular basis factorize into two circle expansions; any
    other geometry goes through the half-plane expansion.
    """
    scalar = Fraction(1)
    shift = [0, 0]
    groups: Dict[Tuple[int, int], List[Tuple[Fraction, int, int]]] = {}
    for c, a, b, m in poles:
        if a == 0 and b == 0:
            raise ValueError("constant binomial among pole factors")
        direction, g, flipped = _primitive(a, b)
        if flipped:
            # (1 - c X^-g) = -c X^-g (1 - X^g / c)
            scalar *= (-c) ** (-m)
            shift[0] += direction[0] * g * m
            shift[1] += direction[1] * g * m
            c = 1 / c
        groups.setdefault(direction, []).append((c, g, m))

    directions = sorted(groups)
    if len(directions) > 2:
        return _cone_inverse(poles, window, order)
    if len(directions) == 0:
        basis = [(1, 0), (0, 1)]
    elif len(directions) == 1:
        basis = [directions[0], _complete_basis(directions[0])]
    else:
        basis = directions
    (v1a, v1b), (v2a, v2b) = basis
    det = v1a * v2b - v1b * v2a
    if abs(det) != 1:
        return _cone_inverse(poles, window, order)

    big = window + max(abs(shift[0]), abs(shift[1]))
    # (i, j) = s v1 + t v2  <=>  s = (v2b i - v2a j)/det, t = (-v1b i + v1a j)/det
    corners = [(i, j) for i in (-big, big) for j in (-big, big)]
    s_vals = [(v2b * i - v2a * j) * det for i, j in corners]
    t_vals = [(-v1b * i + v1a * j) * det for i, j in corners]
    s_lo, s_hi = min(s_vals), max(s_vals)
    t_lo, t_hi = min(t_vals), max(t_vals)

    def circle(direction: Tuple[int, int], lo: int, hi: int) -> Dict[int, Fraction]:
        if direction not in groups:
            return {0: Fraction(1)}
        return circle_inverse(groups[direction], lo, hi)

    first = circle(basis[0], s_lo, s_hi)
    second = circle(basis[1], t_lo, t_hi)
    terms: Dict[Tuple[int, int, int], Fraction] = {}
    for (s, x), (t, y) in cartesian(first.items(), second.items()):
        i = s * v1a + t * v2a + shift[0]
        j = s * v1b + t * v2b + shift[1]
        if abs(i) <= window and abs(j) <= window:
            terms[(i, j, 0)] = terms.get((i, j, 0), Fraction(0)) + scalar * x * y
    return BiLaurentSeries(terms, window, order, TORUS_TAGS)


# ==================== Torus expansion ====================


def _negative_p_depth(ratio: ThetaRatio) -> int:
    """How far below p^0 the numerator factors reach"""
    depth = 0
    for arg, e in ratio.thetas.items():
        k = _spectral_parts(arg)[3]
        if k < 0 and e > 0:
            # theta(x p^k) starts at p^(k (1 - k)/2)
            depth += e * k * (k - 1) // 2
    for arg, e in ratio.binomials.items():
        k = _spectral_parts(arg)[3]
        if k < 0 and e > 0:
            depth -= e * k
    return depth


def expand_on_torus(ratio: ThetaRatio, order: int, window: int, nome: Fraction) -> BiLaurentSeries:
    """
    Laurent expansion in z, w on the unit torus, modulo p^(order + 1).

    Every symbol other than z, w, p must already be specialized to a rational;
    nome is the numeric value of p used for the region checks.
    """
    if ratio.is_zero():
        return BiLaurentSeries({}, window, order, TORUS_TAGS)
    stray = [s for s in ratio.symbols() if s not in ("z", "w", NOME)]
    if stray:
        raise UnassignedSymbol(f"symbols {stray} must be specialized before expansion")
    nome_abs = abs(Fraction(nome))
    pref_val = min((m.exponent(NOME) for m, _ in ratio.prefactor.items()), default=0)
    work = order + max(0, -pref_val) + _negative_p_depth(ratio)

    finite = BiLaurentSeries.from_poly(ratio.prefactor, window, order=work)
    finite.tags = dict(TORUS_TAGS)
    poles: List[PoleBinomial] = []

    for arg, e in ratio.thetas.items():
        c, a, b, _ = _spectral_parts(arg)
        if (a, b) == (0, 0) or e > 0:
            factor = theta_truncated(arg, work) ** e
        else:
            if not nome_abs < abs(c) < 1 / nome_abs:
                raise GenericityViolation(
                    f"theta({arg}) in a denominator needs |p| < |{c}| < 1/|p| on the torus"
                )
            poles.append((c, a, b, -e))
            factor = inverse_elliptic_part(arg, work) ** (-e)
        finite = series_mul(finite, pseries_to_bilaurent(factor, window))

    for arg, e in ratio.binomials.items():
        c, a, b, k = _spectral_parts(arg)
        if e > 0:
            factor = BiLaurentSeries.from_poly((1 - arg) ** e, window, order=work)
            finite = series_mul(finite, factor)
            continue
        if k == 0:
            if (a, b) == (0, 0):
                raise ValueError(f"constant binomial (1 - {arg}) left unabsorbed")
            if abs(c) == 1:
                raise PoleOnContour(f"1/(1 - {arg}) has a pole on the unit torus")
            poles.append((c, a, b, -e))
            continue
        if k > 0:
            if abs(c) * nome_abs ** k >= 1:
                raise GenericityViolation(f"1/(1 - {arg}) does not converge on the torus")
            series = geometric_series(arg, work) ** (-e)
        else:
            # (1 - x p^k) = -x p^k (1 - p^-k / x)
            if nome_abs ** (-k) / abs(c) >= 1:
                raise GenericityViolation(f"1/(1 - {arg}) does not converge on the torus")
            x = LaurentPoly.monomial(Monomial({"z": a, "w": b}), c)
            lead = PSeries.monomial(-(x ** -1), -k, work)
            series = (lead * geometric_series(arg ** -1, work)) ** (-e)
        finite = series_mul(finite, pseries_to_bilaurent(series, window))

    if not poles:
        return BiLaurentSeries(finite.terms, window, min(order, finite.order), TORUS_TAGS)
    sz, sw = finite.spread()
    inverse = torus_pole_inverse(poles, window + max(sz, sw), work)
    result = series_mul(finite, inverse)
    return result.crop(window, order)


def expand_difference(
    ratio: ThetaRatio, variables: Sequence[str], order: int, window: int, nome: Fraction
) -> BiLaurentSeries:
    """
    Iterated difference F -> F(x) - F(x p) in each variable, expanded on the torus.

    Shifts that only change the prefactor share one expansion of the theta part.
    """
    pieces: Dict[ThetaRatio, LaurentPoly] = {}
    for signs in cartesian((0, 1), repeat=len(variables)):
        shifted = ratio
        for var, s in zip(variables, signs):
            if s:
                shifted = shifted.shifted(var, 1)
        sign = -1 if sum(signs) % 2 else 1
        key = shifted.factors()
        pieces[key] = pieces.get(key, LaurentPoly.zero()) + shifted.prefactor * sign
    total: Optional[BiLaurentSeries] = None
    for factors, pref in pieces.items():
        part = expand_on_torus(factors * pref, order, window, nome)
        total = part if total is None else total + part
    return total.crop(window, order)


# ==================== Residues ====================


@dataclass
class Residue:
    location: LaurentPoly
    value: ThetaRatio

    def series(self, values: Mapping[str, Fraction], order: int) -> PSeries:
        """The residue as a p-series after specializing every other symbol"""
        numeric = {s: v for s, v in values.items() if s != NOME}
        expanded = expand_on_torus(self.value.specialize(numeric), order, 0, values[NOME])
        return expanded.coefficient(0, 0)


def _numeric(term: LaurentPoly, values: Mapping[str, Fraction]) -> Fraction:
    return abs(term.specialize(values))


def _annulus_indices(c_abs: Fraction, a: int, nome_abs: Fraction, inner: Fraction, outer: Fraction) -> List[int]:
    """All j with inner < |(p^j / c)^a| <= outer"""
    return [j for j in range(-64, 65) if inner < (nome_abs ** j / c_abs) ** a <= outer]


def annulus_residues(
    ratio: ThetaRatio,
    var: str,
    values: Mapping[str, Fraction],
    inner: Optional[Fraction] = None,
    outer: Optional[Fraction] = None,
) -> List[Residue]:
    """
    Residues of ratio in var at its poles with inner < |x| <= outer.

    The default annulus is |p| < |x| <= 1. values assigns numbers to p and to
    every other symbol and is only used to locate poles; residues themselves
    stay symbolic. Only simple poles are supported.
    """
    nome_abs = abs(Fraction(values[NOME]))
    inner = nome_abs if inner is None else Fraction(inner)
    outer = Fraction(1) if outer is None else Fraction(outer)
    residues: List[Residue] = []
    factors = [(a, e, True) for a, e in ratio.thetas.items()]
    factors += [(a, e, False) for a, e in ratio.binomials.items()]
    for arg, e, is_theta in factors:
        if e >= 0 or var not in arg.symbols():
            continue
        c, m = arg.single_term()
        a = m.exponent(var)
        if abs(a) != 1:
            raise UnsupportedPoleGeometry(f"factor with {var}^{a} in a denominator")
        if e < -1:
            raise UnsupportedPoleGeometry(f"pole of order {-e} at a zero of {arg}")
        coeff = LaurentPoly.monomial(m.without(var), c)
        poles: List[Tuple[LaurentPoly, LaurentPoly, ThetaRatio]] = []
        if is_theta:
            rest = ThetaRatio(ratio.prefactor, {**ratio.thetas, arg: 0}, ratio.binomials)
            for j in _annulus_indices(_numeric(coeff, values), a, nome_abs, inner, outer):
                x0 = (LaurentPoly.symbol(NOME, j) * coeff ** -1) ** a
                sign = -1 if (j + 1) % 2 else 1
                # theta(t) ~ (-1)^j p^(-j(j-1)/2) (-a/x0) (x - x0) near t(x0) = p^j
                local = LaurentPoly.monomial(Monomial.symbol(NOME, j * (j - 1) // 2), Fraction(sign, a)) * x0
                poles.append((x0, local, rest))
        else:
            x0 = coeff ** (-a)
            if inner < _numeric(x0, values) <= outer:
                rest = ThetaRatio(ratio.prefactor, ratio.thetas, {**ratio.binomials, arg: 0})
                poles.append((x0, x0 * Fraction(-1, a), rest))
        for x0, local, rest in poles:
            try:
                value = rest.substitute({var: x0}) * local
            except NotInvertibleInRegion as err:
                raise UnsupportedPoleGeometry(f"pole at {var} = {x0} is not simple") from err
            residues.append(Residue(x0, value))
    return residues


# ==================== Numerical evaluation ====================


def theta_numeric(x, nome):
    """theta(x) = (x; p)(p/x; p) / (p; p)^2"""
    return mpmath.qp(x, nome) * mpmath.qp(nome / x, nome) / mpmath.qp(nome, nome) ** 2


def evaluate(ratio: ThetaRatio, point: Mapping[str, object]):
    """Numerical value of a ratio; point assigns an mpmath number to every symbol including p"""

    def term_value(term: LaurentPoly):
        total = mpmath.mpf(0)
        for mono, c in term.items():
            value = mpmath.mpf(c.numerator) / c.denominator
            for s, e in mono.items():
                if s not in point:
                    raise UnassignedSymbol(f"symbol '{s}' has no numerical value")
                value *= mpmath.mpmathify(point[s]) ** e
            total += value
        return total

    nome = mpmath.mpmathify(point[NOME])
    value = term_value(ratio.prefactor)
    for arg, e in ratio.thetas.items():
        value *= theta_numeric(term_value(arg), nome) ** e
    for arg, e in ratio.binomials.items():
        value *= (1 - term_value(arg)) ** e
    return value


def contour_integral(ratio: ThetaRatio, var: str, radius, point: Mapping[str, object], degree: int = 8):
    """(1/2 pi i) times the integral of ratio d(var) over |var| = radius"""

    def integrand(angle):
        x = radius * mpmath.expj(angle)
        return evaluate(ratio, {**point, var: x}) * x

    return mpmath.quad(integrand, mpmath.linspace(0, 2 * mpmath.pi, 5), maxdegree=degree) / (2 * mpmath.pi)
