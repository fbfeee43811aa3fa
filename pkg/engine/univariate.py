"""
Univariate Laurent expansions on a circle, over sympy polynomial domains.

A rational function without poles on |X| = 1 splits into a part regular
inside the circle (expanded in X) and a part regular outside (expanded in
1/X). The split is the Bezout identity of the two halves of the denominator.
The coefficient field can be QQ or a field of rational functions in another
variable, which is how the mixed torus expansions use this module.
"""

from fractions import Fraction
from typing import Any, Dict, Sequence, Tuple

import mpmath
from sympy import QQ, Poly, Symbol

from engine.errors import NotInvertibleInRegion, PoleOnContour, UnsupportedPoleGeometry
from engine.ring import from_rational, to_rational


X = Symbol("X")

# distance to the unit circle below which a numerical root counts as on it
ROOT_TOLERANCE = mpmath.mpf("1e-10")


def series_quotient(f: Poly, g: Poly, n: int) -> Poly:
    """Power series of f/g up to and including X^n; g must not vanish at 0"""
    if n < 0:
        return Poly(0, f.gen, domain=f.domain)
    if g.eval(0) == 0:
        raise NotInvertibleInRegion(f"{g.as_expr()} vanishes at 0 and has no power series inverse")
    modulus = Poly(f.gen ** (n + 1), f.gen, domain=f.domain)
    return (f * g.invert(modulus)).rem(modulus)


def reversed_poly(f: Poly, d: int) -> Poly:
    """X^d f(1/X) for d >= deg f"""
    coeffs = f.all_coeffs()[::-1]
    coeffs = coeffs + [0] * (d + 1 - len(coeffs))
    return Poly(coeffs, f.gen, domain=f.domain)


def laurent_split(numerator: Poly, regular: Poly, polar: Poly, lo: int, hi: int) -> Dict[int, Any]:
    """
    Coefficients of X^k, lo <= k <= hi, of numerator / (regular * polar) where
    regular has its roots outside the circle and polar inside it.

    With s*regular + t*polar = 1 the function is num*s/polar + num*t/regular.
    """
    s, t, h = regular.gcdex(polar)
    if h.degree() > 0:
        raise NotInvertibleInRegion("inner and outer pole sets are not coprime")
    coeffs: Dict[int, Any] = {}

    def add(k: int, c) -> None:
        if lo <= k <= hi and c != 0:
            coeffs[k] = coeffs.get(k, 0) + c

    # polynomial part of num*s/polar lands on X^k, k >= 0
    whole, proper = (numerator * s).div(polar)
    for (k,), c in whole.as_dict().items():
        add(k, c)
    if hi >= 0:
        for (k,), c in series_quotient(numerator * t, regular, hi).as_dict().items():
            add(k, c)
    d = polar.degree()
    if lo < 0 and d > 0 and not proper.is_zero:
        # proper/polar = rev(proper)(Y) / rev(polar)(Y) with Y = 1/X
        expansion = series_quotient(reversed_poly(proper, d), reversed_poly(polar, d), -lo)
        for (k,), c in expansion.as_dict().items():
            add(-k, c)
    return {k: c for k, c in coeffs.items() if c != 0}


def _to_mpf(c: Fraction) -> mpmath.mpf:
    return mpmath.mpf(c.numerator) / c.denominator


def _side_of_circle(factor: Poly) -> int:
    """-1 when every root of an irreducible factor lies inside |X| = 1, +1 outside"""
    if factor.degree() == 1 and factor.eval(0) == 0:
        return -1
    coeffs = [_to_mpf(from_rational(c)) for c in factor.all_coeffs()]
    moduli = [abs(r) for r in mpmath.polyroots(coeffs, maxsteps=200, extraprec=60)]
    if any(abs(m - 1) < ROOT_TOLERANCE for m in moduli):
        raise PoleOnContour(f"{factor.as_expr()} has a root on the unit circle")
    inside = [m < 1 for m in moduli]
    if all(inside):
        return -1
    if not any(inside):
        return 1
    raise UnsupportedPoleGeometry(f"{factor.as_expr()} has roots on both sides of the unit circle")


def laurent_on_circle(numerator: Poly, denominator: Poly, lo: int, hi: int) -> Dict[int, Fraction]:
    """
    Coefficients of X^k, lo <= k <= hi, of numerator/denominator expanded on
    |X| = 1, for polynomials over QQ. Irreducible factors of the denominator
    are sorted by the side of the circle their roots lie on.
    """
    gen = numerator.gen
    lead, factors = denominator.factor_list()
    regular = Poly(1, gen, domain=QQ)
    polar = Poly(1, gen, domain=QQ)
    for factor, m in factors:
        if _side_of_circle(factor) < 0:
            polar = polar * factor ** m
        else:
            regular = regular * factor ** m
    scaled = numerator.quo_ground(lead)
    return {k: from_rational(c) for k, c in laurent_split(scaled, regular, polar, lo, hi).items()}


def binomial_poly(c: Fraction, g: int) -> Poly:
    """1 - c*X^g"""
    return Poly(1 - to_rational(c) * X ** g, X, domain=QQ)


def circle_inverse(factors: Sequence[Tuple[Fraction, int, int]], lo: int, hi: int) -> Dict[int, Fraction]:
    """
    Coefficients of X^k, lo <= k <= hi, of 1/prod (1 - c X^g)^m expanded on |X| = 1.

    Each factor is (c, g, m) with g >= 1. Factors with |c| < 1 have their roots
    outside the circle and expand in X; factors with |c| > 1 expand in 1/X.
    """
    regular = Poly(1, X, domain=QQ)
    polar = Poly(1, X, domain=QQ)
    for c, g, m in factors:
        c = Fraction(c)
        if g <= 0:
            raise ValueError(f"binomial exponent must be positive, got {g}")
        if abs(c) == 1:
            raise PoleOnContour(f"pole of 1/(1 - {c}*X^{g}) on the unit circle")
        if abs(c) < 1:
            regular = regular * binomial_poly(c, g) ** m
        else:
            polar = polar * binomial_poly(c, g) ** m
    one = Poly(1, X, domain=QQ)
    return {k: from_rational(v) for k, v in laurent_split(one, regular, polar, lo, hi).items()}
