"""
Odd theta function and symbolic theta ratios.

    theta(x) = (1 - x) prod_{s>=1} (1 - p^s x)(1 - p^s / x) / (1 - p^s)^2

normalized so that theta(x) = 1 - x + O(p). A ThetaRatio is a product

    prefactor * prod theta(a_i)^e_i * prod (1 - b_j)^f_j

whose arguments are single terms (coefficient times monomial). Ratios are kept
canonical: p-powers are pulled out of theta arguments with quasi-periodicity,
every theta argument is oriented, and equal arguments are merged.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Tuple, Union

from engine.errors import MixedVariableFactor, NotInvertibleInRegion
from engine.kclass import KClass
from engine.ring import LaurentPoly, Monomial, sorted_symbols
from engine.series import PSeries


NOME = "p"

Term = LaurentPoly


def as_term(value: Union[LaurentPoly, Monomial, int, Fraction]) -> LaurentPoly:
    term = LaurentPoly.lift(value)
    if not term.is_term():
        raise ValueError(f"theta argument {term} must be a single term")
    return term


def split_nome(arg: LaurentPoly) -> Tuple[LaurentPoly, int]:
    """arg = x * p^k with x free of p"""
    c, m = arg.single_term()
    return LaurentPoly.monomial(m.without(NOME), c), m.exponent(NOME)


def orientation(arg: LaurentPoly) -> int:
    """+1 if arg is the canonical representative of {arg, 1/arg}, -1 if not, 0 if arg = 1/arg"""
    c, m = arg.single_term()
    for name in sorted_symbols(m.symbols()):
        e = m.exponent(name)
        if e:
            return 1 if e > 0 else -1
    if abs(c) < 1:
        return 1
    if abs(c) > 1:
        return -1
    return 0


def nome_shift_factor(x: LaurentPoly, k: int) -> LaurentPoly:
    """theta(x p^k) = (-1)^k x^-k p^(-k(k-1)/2) theta(x)"""
    sign = -1 if k % 2 else 1
    return LaurentPoly.monomial(Monomial.symbol(NOME, -k * (k - 1) // 2), sign) * x ** (-k)


# ==================== Automorphy ====================


@dataclass(frozen=True)
class AutomorphyFactor:
    """f(x p) = lam^-1 x^-n f(x), i.e. f is a section of D_(n, lam)"""

    n: int
    lam: LaurentPoly

    @classmethod
    def trivial(cls) -> "AutomorphyFactor":
        return cls(0, LaurentPoly.one())

    def __mul__(self, other: "AutomorphyFactor") -> "AutomorphyFactor":
        return AutomorphyFactor(self.n + other.n, self.lam * other.lam)

    def __pow__(self, e: int) -> "AutomorphyFactor":
        return AutomorphyFactor(self.n * e, self.lam ** e)

    def __str__(self) -> str:
        return f"({self.n}, {self.lam})"


# ==================== Theta ratios ====================


class ThetaRatio:
    __slots__ = ("prefactor", "thetas", "binomials")

    def __init__(
        self,
        prefactor: Union[LaurentPoly, int, Fraction] = 1,
        thetas: Optional[Mapping[LaurentPoly, int]] = None,
        binomials: Optional[Mapping[LaurentPoly, int]] = None,
    ):
        pref = LaurentPoly.lift(prefactor)
        merged_thetas: Dict[LaurentPoly, int] = {}
        merged_binomials: Dict[LaurentPoly, int] = {}
        zero = pref.is_zero()

        for arg, e in (thetas or {}).items():
            if e == 0 or zero:
                continue
            x, k = split_nome(as_term(arg))
            if k:
                pref = pref * nome_shift_factor(x, k) ** e
            side = orientation(x)
            if side < 0:
                pref = pref * (-x) ** e
                x = x ** -1
            if x == 1:
                if e > 0:
                    zero = True
                    continue
                raise NotInvertibleInRegion("theta(1) in a denominator")
            merged_thetas[x] = merged_thetas.get(x, 0) + e

        for arg, e in (binomials or {}).items():
            if e == 0 or zero:
                continue
            arg = as_term(arg)
            if arg == 1:
                if e > 0:
                    zero = True
                    continue
                raise NotInvertibleInRegion("(1 - 1) in a denominator")
            if arg.is_constant():
                pref = pref * LaurentPoly.constant((1 - arg.constant_value()) ** e)
                continue
            merged_binomials[arg] = merged_binomials.get(arg, 0) + e

        if zero:
            self.prefactor = LaurentPoly.zero()
            self.thetas: Dict[LaurentPoly, int] = {}
            self.binomials: Dict[LaurentPoly, int] = {}
            return
        self.prefactor = pref
        self.thetas = {a: e for a, e in merged_thetas.items() if e}
        self.binomials = {a: e for a, e in merged_binomials.items() if e}

    # ==================== Constructors ====================

    @classmethod
    def theta(cls, arg, exponent: int = 1) -> "ThetaRatio":
        return cls(1, {as_term(arg): exponent})

    @classmethod
    def binomial(cls, arg, exponent: int = 1) -> "ThetaRatio":
        """(1 - arg)^exponent"""
        return cls(1, binomials={as_term(arg): exponent})

    @classmethod
    def constant(cls, value) -> "ThetaRatio":
        return cls(value)

    # ==================== Inspection ====================

    def is_zero(self) -> bool:
        return self.prefactor.is_zero()

    def symbols(self) -> List[str]:
        names = set(self.prefactor.symbols())
        for arg in list(self.thetas) + list(self.binomials):
            names.update(arg.symbols())
        return sorted_symbols(names)

    def depends_on(self, var: str) -> bool:
        if var in self.prefactor.symbols():
            return True
        return any(var in a.symbols() for a in list(self.thetas) + list(self.binomials))

    def factors(self) -> "ThetaRatio":
        """The ratio without its prefactor"""
        return ThetaRatio(1, self.thetas, self.binomials)

    def theta_poles(self) -> Dict[LaurentPoly, int]:
        return {a: -e for a, e in self.thetas.items() if e < 0}

    def binomial_poles(self) -> Dict[LaurentPoly, int]:
        return {a: -e for a, e in self.binomials.items() if e < 0}

    # ==================== Arithmetic ====================

    def __mul__(self, other) -> "ThetaRatio":
        if not isinstance(other, ThetaRatio):
            return ThetaRatio(self.prefactor * LaurentPoly.lift(other), self.thetas, self.binomials)
        thetas = dict(self.thetas)
        for a, e in other.thetas.items():
            thetas[a] = thetas.get(a, 0) + e
        binomials = dict(self.binomials)
        for a, e in other.binomials.items():
            binomials[a] = binomials.get(a, 0) + e
        return ThetaRatio(self.prefactor * other.prefactor, thetas, binomials)

    __rmul__ = __mul__

    def inverse(self) -> "ThetaRatio":
        if self.is_zero():
            raise NotInvertibleInRegion("cannot invert the zero ratio")
        pref = self.prefactor
        if pref.is_term():
            inv = pref ** -1
            binomials = {}
        else:
            # 1 - b or c*(1 - b): move into the binomial part
            inv, binomials = _invert_binomial_prefactor(pref)
        inverted = {a: -e for a, e in self.binomials.items()}
        for a, e in binomials.items():
            inverted[a] = inverted.get(a, 0) + e
        return ThetaRatio(inv, {a: -e for a, e in self.thetas.items()}, inverted)

    def __truediv__(self, other) -> "ThetaRatio":
        if not isinstance(other, ThetaRatio):
            other = ThetaRatio(other)
        return self * other.inverse()

    def __pow__(self, n: int) -> "ThetaRatio":
        if n < 0:
            return self.inverse() ** (-n)
        result = ThetaRatio(1)
        for _ in range(n):
            result = result * self
        return result

    def __neg__(self) -> "ThetaRatio":
        return self * -1

    # ==================== Substitution ====================

    def substitute(self, mapping: Mapping[str, LaurentPoly]) -> "ThetaRatio":
        """Substitute single-term images for symbols"""
        images = {s: as_term(v) for s, v in mapping.items()}
        image = lambda a: a.substitute(images)
        return ThetaRatio(
            self.prefactor.substitute(images),
            _collect(self.thetas, image),
            _collect(self.binomials, image),
        )

    def specialize(self, values: Mapping[str, Fraction]) -> "ThetaRatio":
        image = lambda a: a.partial_specialize(values)
        return ThetaRatio(
            self.prefactor.partial_specialize(values),
            _collect(self.thetas, image),
            _collect(self.binomials, image),
        )

    def shifted(self, var: str, k: int) -> "ThetaRatio":
        """var -> var * p^k, re-canonicalized"""
        image = LaurentPoly.monomial(Monomial({var: 1, NOME: k}))
        return self.substitute({var: image})

    # ==================== Quasi-periodicity ====================

    def automorphy(self, var: str) -> AutomorphyFactor:
        """Factor of automorphy in var of the whole ratio"""
        for arg in self.binomials:
            if var in arg.symbols():
                raise MixedVariableFactor(f"(1 - {arg}) is not quasi-periodic in {var}")
        var_exps = {m.exponent(var) for m, _ in self.prefactor.items()}
        if len(var_exps) > 1:
            raise MixedVariableFactor(f"prefactor {self.prefactor} is not a monomial in {var}")
        k = var_exps.pop() if var_exps else 0
        result = AutomorphyFactor(0, LaurentPoly.symbol(NOME, -k))
        for arg, e in self.thetas.items():
            c, m = arg.single_term()
            a = m.exponent(var)
            if a == 0:
                continue
            if abs(a) != 1:
                raise MixedVariableFactor(f"theta({arg}) has {var}^{a}")
            x = LaurentPoly.monomial(m.without(var), c)
            if a == 1:
                factor = AutomorphyFactor(1, -x)
            else:
                # theta(x/var) = -(x/var) theta(var/x)
                factor = AutomorphyFactor(1, -(x ** -1) * LaurentPoly.symbol(NOME))
            result = result * factor ** e
        return result

    # ==================== Comparison ====================

    def __eq__(self, other) -> bool:
        if not isinstance(other, ThetaRatio):
            other = ThetaRatio(other)
        return (
            self.prefactor == other.prefactor
            and self.thetas == other.thetas
            and self.binomials == other.binomials
        )

    def __hash__(self) -> int:
        return hash((self.prefactor, frozenset(self.thetas.items()), frozenset(self.binomials.items())))

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        if self.prefactor != 1 or not (self.thetas or self.binomials):
            parts.append(f"({self.prefactor})" if len(self.prefactor.terms) > 1 else str(self.prefactor))
        for arg, e in _items(self.thetas):
            parts.append(f"theta({arg})" + ("" if e == 1 else f"^{e}"))
        for arg, e in _items(self.binomials):
            parts.append(f"(1 - {arg})" + ("" if e == 1 else f"^{e}"))
        return "*".join(parts)

    def __repr__(self) -> str:
        return f"ThetaRatio({self})"


def _items(factors: Mapping[LaurentPoly, int]) -> List[Tuple[LaurentPoly, int]]:
    return sorted(factors.items(), key=lambda item: str(item[0]))


def _collect(factors: Mapping[LaurentPoly, int], image: Callable[[LaurentPoly], LaurentPoly]) -> Dict[LaurentPoly, int]:
    """Map every argument; arguments with the same image add their exponents"""
    out: Dict[LaurentPoly, int] = {}
    for arg, e in factors.items():
        key = image(arg)
        out[key] = out.get(key, 0) + e
    return out


def _invert_binomial_prefactor(pref: LaurentPoly) -> Tuple[LaurentPoly, Dict[LaurentPoly, int]]:
    """Write pref = c * (1 - b) and return (1/c, {b: -1})"""
    if len(pref.terms) != 2:
        raise NotInvertibleInRegion(f"prefactor {pref} is not a unit")
    (m1, c1), (m2, c2) = pref.sorted_terms()[::-1]
    if not m1.is_one():
        (m1, c1), (m2, c2) = (m2, c2), (m1, c1)
    if not m1.is_one():
        raise NotInvertibleInRegion(f"prefactor {pref} is not of the form c(1 - b)")
    b = LaurentPoly.monomial(m2, -c2 / c1)
    return LaurentPoly.constant(1 / c1), {b: -1}


# ==================== Classes ====================


def theta_of_class(kclass: KClass, scale=1) -> ThetaRatio:
    """theta(scale * K) extended multiplicatively: prod theta(scale * w)^mult"""
    scale = as_term(scale)
    thetas: Dict[LaurentPoly, int] = {}
    for weight, mult in kclass.items():
        arg = scale * LaurentPoly.monomial(weight)
        thetas[arg] = thetas.get(arg, 0) + mult
    return ThetaRatio(1, thetas)


# ==================== Truncated expansion ====================


def _inverse_euler_square(order: int) -> PSeries:
    """prod_{s>=1} (1 - p^s)^-2 as a numeric p-series"""
    coeffs = [Fraction(0)] * (order + 1)
    coeffs[0] = Fraction(1)
    for s in range(1, order + 1):
        for _ in range(2):
            for k in range(s, order + 1):
                coeffs[k] += coeffs[k - s]
    return PSeries(dict(enumerate(coeffs)), order)


def theta_truncated(arg, order: int) -> PSeries:
    """theta(arg) modulo p^(order + 1) as a p-series of Laurent polynomials"""
    x, k = split_nome(as_term(arg))
    extra = k * (k - 1) // 2
    n = order + extra
    inv_x = x ** -1
    coeffs: List[LaurentPoly] = [LaurentPoly.zero()] * (n + 1)
    coeffs[0] = 1 - x
    for s in range(1, n + 1):
        # multiply by (1 - p^s x)(1 - p^s / x) = 1 - p^s (x + 1/x) + p^2s
        nxt = list(coeffs)
        for e in range(s, n + 1):
            nxt[e] = nxt[e] - (x + inv_x) * coeffs[e - s]
            if e >= 2 * s:
                nxt[e] = nxt[e] + coeffs[e - 2 * s]
        coeffs = nxt
    euler = _inverse_euler_square(n)
    series = PSeries(
        {e: sum((euler.coeffs.get(e - j, 0) * coeffs[j] for j in range(e + 1)), LaurentPoly.zero())
         for e in range(n + 1)},
        n,
    )
    if k:
        shift = nome_shift_factor(x, k)
        c, m = shift.single_term()
        series = series.shift(m.exponent(NOME)).map(
            lambda v: v * LaurentPoly.monomial(m.without(NOME), c)
        )
    return series.truncate(order)


def theta_coefficients(arg, order: int) -> Dict[int, LaurentPoly]:
    series = theta_truncated(arg, order)
    return {k: series.coefficient(k) for k in range(series.order + 1)}
