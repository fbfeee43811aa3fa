"""
Exact Laurent polynomials over the rationals.

Symbols are plain strings ("z", "w", "t1", "q1", "u1", "p", ...). The spectral
variables z and w always come first in the canonical symbol order, the rest
are ordered by name. Coefficients are fractions.Fraction throughout.
"""

from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

from sympy import QQ, Poly, Rational, symbols as sympy_symbols
from sympy.polys.polyerrors import ExactQuotientFailed

from engine.errors import NotDivisible, UnassignedSymbol, ZeroAtNegativeExponent


Scalar = Union[int, Fraction]

SPECTRAL_SYMBOLS = ("z", "w")


def symbol_key(name: str) -> Tuple[int, str]:
    """Sort key giving z, w, then every other symbol by name"""
    if name in SPECTRAL_SYMBOLS:
        return (SPECTRAL_SYMBOLS.index(name), "")
    return (len(SPECTRAL_SYMBOLS), name)


def sorted_symbols(names: Iterable[str]) -> List[str]:
    return sorted(set(names), key=symbol_key)


class Monomial:
    """Product of symbols with integer (possibly negative) exponents"""

    __slots__ = ("_powers", "_hash")

    def __init__(self, powers: Optional[Mapping[str, int]] = None):
        items = [(s, int(e)) for s, e in (powers or {}).items() if e != 0]
        items.sort(key=lambda item: symbol_key(item[0]))
        self._powers: Tuple[Tuple[str, int], ...] = tuple(items)
        self._hash = hash(self._powers)

    @classmethod
    def one(cls) -> "Monomial":
        return cls()

    @classmethod
    def symbol(cls, name: str, exponent: int = 1) -> "Monomial":
        return cls({name: exponent})

    @property
    def powers(self) -> Dict[str, int]:
        return dict(self._powers)

    def items(self) -> Tuple[Tuple[str, int], ...]:
        return self._powers

    def exponent(self, name: str) -> int:
        for s, e in self._powers:
            if s == name:
                return e
        return 0

    def symbols(self) -> List[str]:
        return [s for s, _ in self._powers]

    def is_one(self) -> bool:
        return not self._powers

    def without(self, name: str) -> "Monomial":
        return Monomial({s: e for s, e in self._powers if s != name})

    def exponent_vector(self, names: List[str]) -> Tuple[int, ...]:
        powers = dict(self._powers)
        return tuple(powers.get(s, 0) for s in names)

    def __mul__(self, other: "Monomial") -> "Monomial":
        powers = dict(self._powers)
        for s, e in other._powers:
            powers[s] = powers.get(s, 0) + e
        return Monomial(powers)

    def __truediv__(self, other: "Monomial") -> "Monomial":
        return self * other.inverse()

    def __pow__(self, n: int) -> "Monomial":
        return Monomial({s: e * n for s, e in self._powers})

    def inverse(self) -> "Monomial":
        return self ** -1

    def __eq__(self, other) -> bool:
        return isinstance(other, Monomial) and self._powers == other._powers

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Monomial") -> bool:
        names = sorted_symbols(self.symbols() + other.symbols())
        return self.exponent_vector(names) < other.exponent_vector(names)

    def __str__(self) -> str:
        if not self._powers:
            return "1"
        parts = []
        for s, e in self._powers:
            parts.append(s if e == 1 else f"{s}^{e}")
        return "*".join(parts)

    def __repr__(self) -> str:
        return f"Monomial({self})"


def _format_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class LaurentPoly:
    """Immutable finite sum of coefficient * monomial"""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Monomial, Scalar]] = None):
        cleaned: Dict[Monomial, Fraction] = {}
        for m, c in (terms or {}).items():
            c = Fraction(c)
            if c != 0:
                cleaned[m] = c
        self._terms = cleaned
        self._hash: Optional[int] = None

    # ==================== Constructors ====================

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls()

    @classmethod
    def one(cls) -> "LaurentPoly":
        return cls.constant(1)

    @classmethod
    def constant(cls, c: Scalar) -> "LaurentPoly":
        return cls({Monomial.one(): c})

    @classmethod
    def symbol(cls, name: str, exponent: int = 1) -> "LaurentPoly":
        return cls({Monomial.symbol(name, exponent): 1})

    @classmethod
    def monomial(cls, mono: Monomial, coeff: Scalar = 1) -> "LaurentPoly":
        return cls({mono: coeff})

    @classmethod
    def lift(cls, value: Union["LaurentPoly", Scalar, Monomial]) -> "LaurentPoly":
        if isinstance(value, LaurentPoly):
            return value
        if isinstance(value, Monomial):
            return cls.monomial(value)
        return cls.constant(value)

    # ==================== Inspection ====================

    @property
    def terms(self) -> Dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(m.is_one() for m in self._terms)

    def constant_value(self) -> Fraction:
        return self._terms.get(Monomial.one(), Fraction(0))

    def is_term(self) -> bool:
        """True when the polynomial is a single nonzero coefficient times a monomial"""
        return len(self._terms) == 1

    def single_term(self) -> Tuple[Fraction, Monomial]:
        if len(self._terms) != 1:
            raise ValueError(f"{self} is not a single term")
        (m, c), = self._terms.items()
        return c, m

    def symbols(self) -> List[str]:
        names = set()
        for m in self._terms:
            names.update(m.symbols())
        return sorted_symbols(names)

    def degree_range(self, name: str) -> Tuple[int, int]:
        if not self._terms:
            return (0, 0)
        exps = [m.exponent(name) for m in self._terms]
        return (min(exps), max(exps))

    def coefficients_in(self, name: str) -> Dict[int, "LaurentPoly"]:
        """Split into {exponent of name: coefficient polynomial free of name}"""
        buckets: Dict[int, Dict[Monomial, Fraction]] = {}
        for m, c in self._terms.items():
            bucket = buckets.setdefault(m.exponent(name), {})
            rest = m.without(name)
            bucket[rest] = bucket.get(rest, Fraction(0)) + c
        return {e: LaurentPoly(t) for e, t in buckets.items()}

    # ==================== Arithmetic ====================

    def __add__(self, other) -> "LaurentPoly":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self._terms)
        for m, c in other._terms.items():
            terms[m] = terms.get(m, Fraction(0)) + c
        return LaurentPoly(terms)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "LaurentPoly":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "LaurentPoly":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "LaurentPoly":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        terms: Dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = m1 * m2
                terms[m] = terms.get(m, Fraction(0)) + c1 * c2
        return LaurentPoly(terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            c, m = self.single_term()
            return LaurentPoly({m ** n: Fraction(1) / c ** (-n)})
        result = LaurentPoly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other) -> "LaurentPoly":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return divide_exact(self, other)

    def scale(self, coeff: Scalar, mono: Optional[Monomial] = None) -> "LaurentPoly":
        mono = mono or Monomial.one()
        return LaurentPoly({m * mono: c * coeff for m, c in self._terms.items()})

    # ==================== Comparison ====================

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is None:
            return False
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    # ==================== Substitution ====================

    def swap(self, a: str, b: str) -> "LaurentPoly":
        terms: Dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            powers = m.powers
            ea, eb = powers.pop(a, 0), powers.pop(b, 0)
            powers[a], powers[b] = eb, ea
            terms[Monomial(powers)] = c
        return LaurentPoly(terms)

    def is_symmetric(self, a: str, b: str) -> bool:
        return self == self.swap(a, b)

    def specialize(self, values: Mapping[str, Scalar]) -> Fraction:
        """Evaluate at rational values; every symbol must be assigned"""
        total = Fraction(0)
        for m, c in self._terms.items():
            value = c
            for s, e in m.items():
                if s not in values:
                    raise UnassignedSymbol(f"symbol '{s}' has no value in {self}")
                x = Fraction(values[s])
                if x == 0 and e < 0:
                    raise ZeroAtNegativeExponent(f"{s}=0 with exponent {e} in {self}")
                value *= x ** e
            total += value
        return total

    def partial_specialize(self, values: Mapping[str, Scalar]) -> "LaurentPoly":
        terms: Dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            coeff = c
            rest = {}
            for s, e in m.items():
                if s in values:
                    x = Fraction(values[s])
                    if x == 0 and e < 0:
                        raise ZeroAtNegativeExponent(f"{s}=0 with exponent {e} in {self}")
                    coeff *= x ** e
                else:
                    rest[s] = e
            key = Monomial(rest)
            terms[key] = terms.get(key, Fraction(0)) + coeff
        return LaurentPoly(terms)

    def substitute(self, mapping: Mapping[str, "LaurentPoly"]) -> "LaurentPoly":
        """Replace symbols by polynomials; negative powers need single-term images"""
        result = LaurentPoly.zero()
        for m, c in self._terms.items():
            term = LaurentPoly.constant(c)
            for s, e in m.items():
                if s not in mapping:
                    term = term * LaurentPoly.symbol(s, e)
                    continue
                image = LaurentPoly.lift(mapping[s])
                if e < 0 and not image.is_term():
                    if image.is_zero():
                        raise ZeroAtNegativeExponent(f"{s} -> 0 with exponent {e}")
                    raise NotDivisible(f"cannot invert {image} substituted for {s}")
                term = term * image ** e
            result = result + term
        return result

    # ==================== Printing ====================

    def sorted_terms(self) -> List[Tuple[Monomial, Fraction]]:
        names = self.symbols()
        return sorted(self._terms.items(), key=lambda mc: mc[0].exponent_vector(names), reverse=True)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        out = ""
        for i, (m, c) in enumerate(self.sorted_terms()):
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if m.is_one():
                body = _format_fraction(mag)
            elif mag == 1:
                body = str(m)
            else:
                body = f"{_format_fraction(mag)}*{m}"
            if i == 0:
                out = body if sign == "+" else f"-{body}"
            else:
                out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"


def _coerce(value) -> Optional[LaurentPoly]:
    if isinstance(value, LaurentPoly):
        return value
    if isinstance(value, (int, Fraction)):
        return LaurentPoly.constant(value)
    if isinstance(value, Monomial):
        return LaurentPoly.monomial(value)
    return None


def symbols(*names: str) -> Tuple[LaurentPoly, ...]:
    return tuple(LaurentPoly.symbol(n) for n in names)


def to_rational(c: Scalar) -> Rational:
    c = Fraction(c)
    return Rational(c.numerator, c.denominator)


def from_rational(c) -> Fraction:
    c = Rational(c)
    return Fraction(int(c.p), int(c.q))


def _shifted_poly(poly: LaurentPoly, names: List[str]) -> Tuple[Poly, Dict[str, int]]:
    """poly times the monomial that clears its negative and surplus exponents"""
    low = {s: poly.degree_range(s)[0] for s in names}
    coeffs = {
        tuple(m.exponent(s) - low[s] for s in names): to_rational(c) for m, c in poly.items()
    }
    return Poly.from_dict(coeffs, *sympy_symbols(names), domain=QQ), low


def divide_exact(a: LaurentPoly, d: LaurentPoly) -> LaurentPoly:
    """
    Exact quotient a/d in the Laurent ring.

    Both sides are shifted into the polynomial ring by their lowest exponents;
    the shifted divisor has no monomial factor, so it divides the shifted
    dividend exactly when d divides a.
    """
    if d.is_zero():
        raise NotDivisible("division by zero")
    if a.is_zero():
        return LaurentPoly.zero()
    names = sorted_symbols(a.symbols() + d.symbols())
    if not names:
        return LaurentPoly.constant(a.constant_value() / d.constant_value())
    num, num_low = _shifted_poly(a, names)
    den, den_low = _shifted_poly(d, names)
    try:
        quotient = num.exquo(den)
    except ExactQuotientFailed:
        raise NotDivisible(f"{d} does not divide {a}") from None
    terms: Dict[Monomial, Fraction] = {}
    for exps, c in quotient.as_dict().items():
        mono = Monomial({s: e + num_low[s] - den_low[s] for s, e in zip(names, exps)})
        terms[mono] = from_rational(c)
    return LaurentPoly(terms)


def is_divisible(a: LaurentPoly, d: LaurentPoly) -> bool:
    try:
        divide_exact(a, d)
        return True
    except NotDivisible:
        return False
