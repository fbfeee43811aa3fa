"""
The zeta kernels at every level, their expansions and gamma tables, the
diagonal-class algebra used by the sheaf-level kernels, and the degenerations
elliptic -> trigonometric -> rational.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial
from typing import Dict, List, Tuple, Union

from engine.errors import (
    DivisibilityViolation,
    InvalidCombination,
    MismatchWithPlainGamma,
    NotDivisible,
    NotInvertibleInRegion,
)
from engine.kclass import KClass
from engine.ring import LaurentPoly, Monomial, divide_exact
from engine.series import BiLaurentSeries, Region, expand_rational
from engine.theta import NOME, ThetaRatio, theta_of_class


LEVELS = ("rational", "trig", "elliptic")
VARIANTS = ("plain", "tilde", "tildePlus", "tildeMinus", "ratioForward", "ratioBackward")

X = LaurentPoly.symbol("x")
T1, T2 = LaurentPoly.symbol("t1"), LaurentPoly.symbol("t2")
Q1, Q2 = LaurentPoly.symbol("q1"), LaurentPoly.symbol("q2")
T = T1 + T2
Q = Q1 * Q2
Z, W = LaurentPoly.symbol("z"), LaurentPoly.symbol("w")
ONE = LaurentPoly.one()

# red and blue pull-backs of t = c1(K_S) and q = [K_S]
RED_T, BLUE_T = LaurentPoly.symbol("tr"), LaurentPoly.symbol("tb")
RED_Q, BLUE_Q = LaurentPoly.symbol("qr"), LaurentPoly.symbol("qb")

# square-rule constants for [Delta] and [O_Delta]
DIAGONAL_CONSTANTS = {"coh": T1 * T2, "kth": (1 - Q1) * (1 - Q2)}


# ==================== Rational functions ====================


@dataclass(frozen=True)
class RationalFunction:
    numerator: LaurentPoly
    denominator: LaurentPoly = field(default_factory=LaurentPoly.one)

    @classmethod
    def of(cls, value) -> "RationalFunction":
        if isinstance(value, RationalFunction):
            return value
        return cls(LaurentPoly.lift(value))

    def __mul__(self, other) -> "RationalFunction":
        other = RationalFunction.of(other)
        return RationalFunction(self.numerator * other.numerator, self.denominator * other.denominator)

    __rmul__ = __mul__

    def __add__(self, other) -> "RationalFunction":
        other = RationalFunction.of(other)
        if self.denominator == other.denominator:
            return RationalFunction(self.numerator + other.numerator, self.denominator)
        return RationalFunction(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
        )

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.numerator, self.denominator)

    def __sub__(self, other) -> "RationalFunction":
        return self + (-RationalFunction.of(other))

    def inverse(self) -> "RationalFunction":
        if self.numerator.is_zero():
            raise NotInvertibleInRegion("cannot invert the zero function")
        return RationalFunction(self.denominator, self.numerator)

    def __truediv__(self, other) -> "RationalFunction":
        return self * RationalFunction.of(other).inverse()

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def reduced(self) -> "RationalFunction":
        """Cancel the denominator when it divides the numerator"""
        try:
            return RationalFunction(divide_exact(self.numerator, self.denominator))
        except NotDivisible:
            return self

    def at(self, value) -> "RationalFunction":
        """Substitute x -> value"""
        image = {"x": LaurentPoly.lift(value)}
        return _clear(self.numerator.substitute(image), self.denominator.substitute(image))

    def substitute(self, mapping) -> "RationalFunction":
        return _clear(self.numerator.substitute(mapping), self.denominator.substitute(mapping))

    def swap(self, a: str, b: str) -> "RationalFunction":
        return RationalFunction(self.numerator.swap(a, b), self.denominator.swap(a, b))

    def expand(self, region: Region, window: int) -> BiLaurentSeries:
        return expand_rational(self.numerator, self.denominator, region, window)

    def __eq__(self, other) -> bool:
        other = RationalFunction.of(other)
        return self.numerator * other.denominator == other.numerator * self.denominator

    __hash__ = None

    def __str__(self) -> str:
        if self.denominator == 1:
            return str(self.numerator)
        return f"({self.numerator})/({self.denominator})"


def _clear(numerator: LaurentPoly, denominator: LaurentPoly) -> RationalFunction:
    """Keep denominators free of negative powers by moving monomials across"""
    shift: Dict[str, int] = {}
    for poly in (numerator, denominator):
        for s in poly.symbols():
            lo, _ = poly.degree_range(s)
            shift[s] = max(shift.get(s, 0), -lo)
    mono = LaurentPoly.monomial(Monomial(shift))
    return RationalFunction(numerator * mono, denominator * mono)


# ==================== Diagonal-class algebra ====================


@dataclass(frozen=True)
class DiagonalElement:
    """A + B*D with D^2 = e*D, where D is [Delta] or [O_Delta]"""

    kind: str
    a: RationalFunction
    b: RationalFunction

    @property
    def square_constant(self) -> LaurentPoly:
        return DIAGONAL_CONSTANTS[self.kind]

    def __mul__(self, other) -> "DiagonalElement":
        if not isinstance(other, DiagonalElement):
            other = DiagonalElement(self.kind, RationalFunction.of(other), RationalFunction.of(0))
        e = self.square_constant
        return DiagonalElement(
            self.kind,
            self.a * other.a,
            self.a * other.b + other.a * self.b + self.b * other.b * e,
        )

    __rmul__ = __mul__

    def inverse(self) -> "DiagonalElement":
        """1/(A + BD) = 1/A - B D / (A (A + e B))"""
        e = self.square_constant
        a_inv = self.a.inverse()
        return DiagonalElement(self.kind, a_inv, -(self.b / (self.a * (self.a + self.b * e))))

    def __truediv__(self, other: "DiagonalElement") -> "DiagonalElement":
        return self * other.inverse()

    def at(self, value) -> "DiagonalElement":
        return DiagonalElement(self.kind, self.a.at(value), self.b.at(value))

    def collapse(self) -> RationalFunction:
        """Replace D by e, the plain-level image"""
        return self.a + self.b * self.square_constant

    def __str__(self) -> str:
        symbol = "[Delta]" if self.kind == "coh" else "[O_Delta]"
        return f"{self.a} + ({self.b})*{symbol}"


KernelBody = Union[RationalFunction, DiagonalElement, ThetaRatio]


@dataclass(frozen=True)
class KernelExpr:
    level: str
    variant: str
    colored: bool
    body: KernelBody

    def at(self, value) -> KernelBody:
        if isinstance(self.body, ThetaRatio):
            return self.body.substitute({"x": LaurentPoly.lift(value)})
        return self.body.at(value)

    def __str__(self) -> str:
        tag = "sheaf" if self.colored else "plain"
        return f"zeta[{self.level}/{self.variant}/{tag}](x) = {self.body}"


# ==================== Kernel definitions ====================


def koszul_diagonal(line: str = "L1") -> KClass:
    """O_Delta = 1 - L1 - L2 + q with L2 = q/L1"""
    q = Monomial({"q1": 1, "q2": 1})
    l1 = Monomial.symbol(line)
    return KClass.koszul(l1, q / l1)


def _theta(arg) -> ThetaRatio:
    return ThetaRatio.theta(arg)


def zeta_kernel(level: str, variant: str = "plain", colored: bool = False) -> KernelExpr:
    """The defining expression of a zeta kernel in the variable x"""
    if level not in LEVELS or variant not in VARIANTS:
        raise InvalidCombination(f"unknown kernel {level}/{variant}")
    if colored and variant == "tilde":
        raise InvalidCombination("sheaf-level tilde kernels come in +/- colors")
    if not colored and variant in ("tildePlus", "tildeMinus"):
        raise InvalidCombination(f"{variant} is only defined for sheaf-level kernels")

    if variant in ("ratioForward", "ratioBackward"):
        plain = zeta_kernel(level, "plain", colored).body
        forward = _ratio(level, plain)
        body = forward if variant == "ratioForward" else _invert(forward)
        return KernelExpr(level, variant, colored, body)

    if level == "rational":
        if not colored:
            plain = RationalFunction((X + T1) * (X + T2), X * (X + T))
            tilde = RationalFunction((X + T1) * (X + T2) * (X - T), X)
            return KernelExpr(level, variant, colored, plain if variant == "plain" else tilde)
        plain = DiagonalElement("coh", RationalFunction.of(1), RationalFunction(ONE, X * (X + T)))
        if variant == "plain":
            return KernelExpr(level, variant, colored, plain)
        sign = 1 if variant == "tildePlus" else -1
        return KernelExpr(level, variant, colored, plain * ((X + sign * RED_T) * (X - sign * BLUE_T)))

    if level == "trig":
        if not colored:
            plain = RationalFunction((1 - X * Q1) * (1 - X * Q2), (1 - X) * (1 - X * Q))
            tilde = RationalFunction((1 - X * Q1) * (1 - X * Q2) * (X - Q), X * (1 - X))
            return KernelExpr(level, variant, colored, plain if variant == "plain" else tilde)
        plain = DiagonalElement("kth", RationalFunction.of(1), RationalFunction(X, (1 - X) * (1 - X * Q)))
        if variant == "plain":
            return KernelExpr(level, variant, colored, plain)
        if variant == "tildePlus":
            factor = RationalFunction((1 - X * RED_Q) * (X - BLUE_Q), X)
        else:
            factor = RationalFunction((X - RED_Q) * (1 - X * BLUE_Q), X)
        return KernelExpr(level, variant, colored, plain * factor)

    # elliptic
    q = Monomial({"q1": 1, "q2": 1})
    x = Monomial.symbol("x")
    if not colored:
        plain = _theta(x * Monomial.symbol("q1")) * _theta(x * Monomial.symbol("q2")) / (_theta(x) * _theta(x * q))
        if variant == "plain":
            return KernelExpr(level, variant, colored, plain)
        return KernelExpr(level, variant, colored, plain * _theta(x * q) * _theta(q / x))
    plain = theta_of_class(-koszul_diagonal(), x)
    if variant == "plain":
        return KernelExpr(level, variant, colored, plain)
    red, blue = Monomial.symbol("qr"), Monomial.symbol("qb")
    if variant == "tildePlus":
        return KernelExpr(level, variant, colored, plain * _theta(x * red) * _theta(blue / x))
    return KernelExpr(level, variant, colored, plain * _theta(red / x) * _theta(x * blue))


def _ratio(level: str, plain: KernelBody) -> KernelBody:
    """zeta(z - w)/zeta(w - z) or zeta(z/w)/zeta(w/z)"""
    if level == "rational":
        forward, backward = Z - W, W - Z
    else:
        forward, backward = LaurentPoly.monomial(Monomial({"z": 1, "w": -1})), LaurentPoly.monomial(
            Monomial({"z": -1, "w": 1})
        )
    if isinstance(plain, ThetaRatio):
        return plain.substitute({"x": forward}) / plain.substitute({"x": backward})
    return plain.at(forward) / plain.at(backward)


def _invert(body: KernelBody) -> KernelBody:
    return body.inverse()


def zeta_colored_symmetric(kind_level: str) -> bool:
    """The + and - colored tildes are exchanged by swapping red and blue"""
    plus = zeta_kernel(kind_level, "tildePlus", colored=True).body
    minus = zeta_kernel(kind_level, "tildeMinus", colored=True).body
    red, blue = ("tr", "tb") if kind_level == "rational" else ("qr", "qb")
    if isinstance(plus, ThetaRatio):
        swapped = plus.substitute({red: LaurentPoly.symbol(blue), blue: LaurentPoly.symbol(red)})
        return swapped == minus
    swapped = DiagonalElement(plus.kind, plus.a.swap(red, blue), plus.b.swap(red, blue))
    return swapped.a == minus.a and swapped.b == minus.b


# ==================== Gamma tables ====================


@dataclass
class GammaTable:
    level: str
    entries: Dict[Tuple, LaurentPoly]
    divided: bool = True
    divisor: LaurentPoly = field(default_factory=LaurentPoly.one)

    def rows(self) -> List[Dict[str, str]]:
        out = []
        for key in sorted(self.entries):
            row = {"level": self.level}
            if isinstance(key[0], int):
                row.update({"a": str(key[0]), "b": str(key[1])})
            else:
                row.update({"sign": key[0], "a": str(key[1])})
            row["gamma"] = str(self.entries[key])
            out.append(row)
        return out

    def get(self, *key) -> LaurentPoly:
        return self.entries.get(tuple(key), LaurentPoly.zero())


def _divide_or_fail(value: LaurentPoly, divisor: LaurentPoly, where: str) -> LaurentPoly:
    try:
        return divide_exact(value, divisor)
    except NotDivisible as e:
        raise DivisibilityViolation(f"{where}: {value} is not divisible by {divisor}") from e


def _coefficient_value(series: BiLaurentSeries, i: int, j: int) -> LaurentPoly:
    return LaurentPoly.lift(series.coefficient(i, j).coefficient(0))


REGION_PLUS = Region.dominating("z", "w")
REGION_MINUS = Region.dominating("w", "z")


@lru_cache(maxsize=None)
def gamma_coefficients(level: str, max_order: int) -> GammaTable:
    """
    Divided coefficients of zeta(z-w)/zeta(w-z) (rational) or zeta(z/w)/zeta(w/z)
    (trig) expanded in non-negative powers of w/z (and z/w for gamma^-).
    """
    ratio = zeta_kernel(level, "ratioForward").body
    if level == "rational":
        if max_order < 3:
            raise InvalidCombination("rational gamma tables start at a = 3")
        divisor = T1 * T2
        series = ratio.expand(REGION_PLUS, max_order)
        if _coefficient_value(series, 0, 0) != 1:
            raise DivisibilityViolation("expansion does not start with 1")
        entries: Dict[Tuple, LaurentPoly] = {}
        for (i, j, _), value in series.terms.items():
            if (i, j) == (0, 0):
                continue
            a, b = -i, j
            if not (a >= 3 and 0 <= b <= a - 2):
                raise DivisibilityViolation(f"unexpected term w^{b}/z^{a} in the expansion")
        for a in range(3, max_order + 1):
            for b in range(0, a - 1):
                value = _coefficient_value(series, -a, b)
                entries[(a, b)] = _divide_or_fail(value, divisor, f"gamma_{a},{b}")
        return GammaTable(level, entries, True, divisor)
    if level == "trig":
        if max_order < 1:
            raise InvalidCombination("trig gamma tables start at a = 1")
        divisor = (1 - Q1) * (1 - Q2)
        entries = {}
        for sign, region in (("+", REGION_PLUS), ("-", REGION_MINUS)):
            series = ratio.expand(region, max_order)
            s = 1 if sign == "+" else -1
            for a in range(1, max_order + 1):
                value = _coefficient_value(series, -s * a, s * a)
                entries[(sign, a)] = _divide_or_fail(value, divisor, f"gamma^{sign}_{a}")
        return GammaTable(level, entries, True, divisor)
    raise InvalidCombination(f"no gamma table at level {level}")


def sheaf_gamma_expansion(kind: str, max_order: int) -> GammaTable:
    """
    Expand zeta(z-w)/zeta(w-z) (coh) or zeta(z/w)/zeta(w/z) (kth) in the
    diagonal-class algebra; the D-coefficients must equal the plain gammas.
    """
    level = {"coh": "rational", "kth": "trig"}.get(kind)
    if level is None:
        raise InvalidCombination(f"unknown diagonal kind {kind}")
    ratio = zeta_kernel(level, "ratioForward", colored=True).body
    if ratio.a != 1:
        raise MismatchWithPlainGamma(f"D-free part of the {kind} ratio is {ratio.a}, expected 1")
    plain = gamma_coefficients(level, max_order)
    entries: Dict[Tuple, LaurentPoly] = {}
    if kind == "coh":
        series = ratio.b.expand(REGION_PLUS, max_order)
        for (a, b), expected in plain.entries.items():
            value = _coefficient_value(series, -a, b)
            if value != expected:
                raise MismatchWithPlainGamma(f"D-coefficient of w^{b}/z^{a} is {value}, plain gamma is {expected}")
            entries[(a, b)] = value
    else:
        for sign, region in (("+", REGION_PLUS), ("-", REGION_MINUS)):
            series = ratio.b.expand(region, max_order)
            s = 1 if sign == "+" else -1
            for a in range(1, max_order + 1):
                value = _coefficient_value(series, -s * a, s * a)
                expected = plain.get(sign, a)
                if value != expected:
                    raise MismatchWithPlainGamma(
                        f"D-coefficient of gamma^{sign}_{a} is {value}, plain gamma is {expected}"
                    )
                entries[(sign, a)] = value
    return GammaTable(kind, entries, True, DIAGONAL_CONSTANTS[kind])


# ==================== Degenerations ====================


def degenerate(kernel: KernelExpr, target: str, max_epsilon: int = 12) -> KernelExpr:
    """
    pZero: elliptic -> trig by theta(c) -> (1 - c).
    rationalLimit: trig -> rational by x = exp(eps x), q_i = exp(eps t_i),
    keeping the leading order in eps.
    """
    if target == "pZero":
        if kernel.level != "elliptic" or not isinstance(kernel.body, ThetaRatio):
            raise InvalidCombination("pZero applies to plain elliptic kernels")
        return KernelExpr("trig", kernel.variant, False, p_zero(kernel.body))
    if target == "rationalLimit":
        if kernel.level != "trig" or not isinstance(kernel.body, RationalFunction):
            raise InvalidCombination("rationalLimit applies to plain trigonometric kernels")
        return KernelExpr("rational", kernel.variant, False, rational_limit(kernel.body, max_epsilon))
    raise InvalidCombination(f"unknown degeneration target {target}")


def p_zero(ratio: ThetaRatio) -> RationalFunction:
    """Set p = 0: theta(c) becomes (1 - c)"""
    coeffs = ratio.prefactor.coefficients_in(NOME)
    if any(k < 0 for k in coeffs):
        raise InvalidCombination(f"prefactor {ratio.prefactor} has negative powers of p")
    numerator = coeffs.get(0, LaurentPoly.zero())
    denominator = LaurentPoly.one()
    for arg, e in list(ratio.thetas.items()) + list(ratio.binomials.items()):
        if arg.degree_range(NOME)[0] > 0:
            continue
        factor = 1 - arg
        if e > 0:
            numerator = numerator * factor ** e
        else:
            denominator = denominator * factor ** (-e)
    return _clear(numerator, denominator)


def _epsilon_leading(poly: LaurentPoly, max_order: int) -> Tuple[int, LaurentPoly]:
    """
    Substitute every monomial x^a q1^b q2^c -> exp(eps (a x + b t1 + c t2)) and
    return the first nonzero eps-order with its coefficient.
    """
    renames = {"x": X, "q1": T1, "q2": T2}
    linear = []
    for mono, c in poly.items():
        form = LaurentPoly.zero()
        for s, e in mono.items():
            if s not in renames:
                raise InvalidCombination(f"cannot take the rational limit of symbol {s}")
            form = form + renames[s] * e
        linear.append((c, form))
    power = [LaurentPoly.one() for _ in linear]
    for n in range(max_order + 1):
        total = LaurentPoly.zero()
        for i, (c, form) in enumerate(linear):
            total = total + power[i] * (c / factorial(n))
            power[i] = power[i] * form
        if not total.is_zero():
            return n, total
    raise InvalidCombination(f"{poly} vanishes to eps-order {max_order}")


def rational_limit(function: RationalFunction, max_order: int = 12) -> RationalFunction:
    vn, lead_n = _epsilon_leading(function.numerator, max_order)
    vd, lead_d = _epsilon_leading(function.denominator, max_order)
    del vn, vd  # the global power of eps is cleared
    return RationalFunction(lead_n, lead_d)
