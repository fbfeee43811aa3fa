"""
Truncated series containers.

PSeries        - series in the nome p with exact coefficients, known up to an order
GradedSeries   - two variable expansion of a rational function along a weight
BiLaurentSeries- boxed Laurent series in (z, w) with p-series coefficients
FormalDelta    - the formal delta function delta(w/(x0 z))
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

from engine.errors import IncompatibleRegions, InvalidCombination, NotInvertibleInRegion
from engine.ring import LaurentPoly


def _is_zero(value: Any) -> bool:
    return value == 0


def _invert_scalar(value: Any) -> Any:
    if isinstance(value, LaurentPoly):
        if not value.is_term():
            raise NotInvertibleInRegion(f"coefficient {value} is not a unit")
        return value ** -1
    if value == 0:
        raise NotInvertibleInRegion("zero coefficient is not invertible")
    return Fraction(1) / value


# ==================== PSeries ====================


class PSeries:
    """Sum of c_k p^k for k <= order; every coefficient up to order is exact"""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Optional[Dict[int, Any]] = None, order: int = 0):
        self.order = order
        self.coeffs: Dict[int, Any] = {
            k: v for k, v in (coeffs or {}).items() if k <= order and not _is_zero(v)
        }

    @classmethod
    def constant(cls, value: Any, order: int) -> "PSeries":
        return cls({0: value}, order)

    @classmethod
    def monomial(cls, value: Any, exponent: int, order: int) -> "PSeries":
        return cls({exponent: value}, order)

    def coefficient(self, k: int) -> Any:
        if k > self.order:
            raise ValueError(f"p^{k} is beyond the known order {self.order}")
        return self.coeffs.get(k, 0)

    def valuation(self) -> Optional[int]:
        return min(self.coeffs) if self.coeffs else None

    def is_zero(self) -> bool:
        return not self.coeffs

    def truncate(self, order: int) -> "PSeries":
        return PSeries(self.coeffs, min(order, self.order))

    def map(self, fn: Callable[[Any], Any]) -> "PSeries":
        return PSeries({k: fn(v) for k, v in self.coeffs.items()}, self.order)

    def shift(self, k: int) -> "PSeries":
        """Multiply by p^k"""
        return PSeries({e + k: v for e, v in self.coeffs.items()}, self.order + k)

    def __add__(self, other) -> "PSeries":
        if not isinstance(other, PSeries):
            other = PSeries.constant(other, self.order)
        order = min(self.order, other.order)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return PSeries(out, order)

    __radd__ = __add__

    def __neg__(self) -> "PSeries":
        return PSeries({k: -v for k, v in self.coeffs.items()}, self.order)

    def __sub__(self, other) -> "PSeries":
        if not isinstance(other, PSeries):
            other = PSeries.constant(other, self.order)
        return self + (-other)

    def __rsub__(self, other) -> "PSeries":
        return (-self) + other

    def __mul__(self, other) -> "PSeries":
        if not isinstance(other, PSeries):
            return PSeries({k: v * other for k, v in self.coeffs.items()}, self.order)
        va = self.valuation()
        vb = other.valuation()
        if va is None or vb is None:
            bound = min(self.order + (vb or 0), other.order + (va or 0))
            return PSeries({}, bound)
        order = min(self.order + vb, other.order + va)
        out: Dict[int, Any] = {}
        for ka, a in self.coeffs.items():
            for kb, b in other.coeffs.items():
                k = ka + kb
                if k > order:
                    continue
                out[k] = out.get(k, 0) + a * b
        return PSeries(out, order)

    __rmul__ = __mul__

    def inverse(self) -> "PSeries":
        v = self.valuation()
        if v is None:
            raise NotInvertibleInRegion("zero p-series is not invertible")
        lead_inv = _invert_scalar(self.coeffs[v])
        unit = self.shift(-v)
        n = unit.order
        inv: Dict[int, Any] = {0: lead_inv}
        for k in range(1, n + 1):
            acc = 0
            for i in range(1, k + 1):
                if i in unit.coeffs and (k - i) in inv:
                    acc = acc + unit.coeffs[i] * inv[k - i]
            if not _is_zero(acc):
                inv[k] = -(acc * lead_inv)
        return PSeries(inv, n).shift(-v)

    def __pow__(self, n: int) -> "PSeries":
        base = self if n >= 0 else self.inverse()
        if n == 0:
            return PSeries.constant(Fraction(1), base.order)
        result = base
        for _ in range(abs(n) - 1):
            result = result * base
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, PSeries):
            other = PSeries.constant(other, self.order)
        order = min(self.order, other.order)
        keys = {k for k in set(self.coeffs) | set(other.coeffs) if k <= order}
        return all(self.coeffs.get(k, 0) == other.coeffs.get(k, 0) for k in keys)

    def __repr__(self) -> str:
        body = " + ".join(f"({v})*p^{k}" for k, v in sorted(self.coeffs.items())) or "0"
        return f"{body} + O(p^{self.order + 1})"


# ==================== Regions ====================


UNIT_CIRCLE = "unit-circle"
SCALED_CIRCLE = "scaled-circle"
INNER = "inner-expansion"
OUTER = "outer-expansion"
DISTRIBUTION = "distribution"


@dataclass(frozen=True)
class RegionTag:
    kind: str
    rho: Optional[Fraction] = None
    support: Optional[str] = None
    priority: int = 1

    def weight(self) -> int:
        if self.kind == OUTER:
            return self.priority
        if self.kind == INNER:
            return -self.priority
        return 0

    def __str__(self) -> str:
        if self.kind == SCALED_CIRCLE:
            return f"|x|={self.rho}"
        if self.kind == DISTRIBUTION:
            return f"distribution({self.support})"
        return self.kind


@dataclass(frozen=True)
class Region:
    """Where each spectral variable lives; the weight vector orders monomials"""

    z: RegionTag = field(default_factory=lambda: RegionTag(UNIT_CIRCLE))
    w: RegionTag = field(default_factory=lambda: RegionTag(UNIT_CIRCLE))

    @classmethod
    def dominating(cls, large: str, small: str) -> "Region":
        """|large| > |small|, for example the region |z| > |w|"""
        tags = {large: RegionTag(OUTER), small: RegionTag(INNER)}
        return cls(z=tags.get("z", RegionTag(UNIT_CIRCLE)), w=tags.get("w", RegionTag(UNIT_CIRCLE)))

    @classmethod
    def lex(cls, z_outer: bool, w_outer: bool, w_priority: int = 1, z_priority: int = 1) -> "Region":
        """Each variable near infinity or near zero; the higher priority is expanded first"""
        return cls(
            z=RegionTag(OUTER if z_outer else INNER, priority=z_priority),
            w=RegionTag(OUTER if w_outer else INNER, priority=w_priority),
        )

    def weights(self) -> Tuple[int, int]:
        return (self.z.weight(), self.w.weight())

    def tags(self) -> Dict[str, RegionTag]:
        return {"z": self.z, "w": self.w}


# ==================== Graded expansions ====================


def _poly_to_grid(poly: LaurentPoly) -> Dict[Tuple[int, int], Any]:
    """Split a polynomial into {(z exponent, w exponent): coefficient}"""
    grid: Dict[Tuple[int, int], Any] = {}
    for mono, c in poly.items():
        key = (mono.exponent("z"), mono.exponent("w"))
        rest = mono.without("z").without("w")
        grid[key] = grid.get(key, LaurentPoly.zero()) + LaurentPoly.monomial(rest, c)
    return {k: _simplify(v) for k, v in grid.items() if not v.is_zero()}


def _simplify(value: Any) -> Any:
    if isinstance(value, LaurentPoly) and value.is_constant():
        return value.constant_value()
    return value


class GradedSeries:
    """
    Expansion in (z, w) graded by weight(i, j) = wz*i + ww*j.

    All terms with weight >= floor are present and exact; floor None marks an
    exact polynomial. A weight vector with a unique leading term makes
    polynomial denominators invertible.
    """

    def __init__(self, weights: Tuple[int, int], terms: Dict[Tuple[int, int], Any], floor: Optional[int]):
        self.weights = weights
        self.floor = floor
        self.terms = {
            k: v
            for k, v in terms.items()
            if (floor is None or self.weight(k) >= floor) and not _is_zero(v)
        }

    def weight(self, key: Tuple[int, int]) -> int:
        return self.weights[0] * key[0] + self.weights[1] * key[1]

    def max_weight(self) -> int:
        return max((self.weight(k) for k in self.terms), default=self.floor or 0)

    @classmethod
    def from_poly(cls, poly: LaurentPoly, weights: Tuple[int, int]) -> "GradedSeries":
        return cls(weights, _poly_to_grid(poly), None)

    def __mul__(self, other: "GradedSeries") -> "GradedSeries":
        if self.weights != other.weights:
            raise IncompatibleRegions("graded series with different weights")
        bounds = []
        if self.floor is not None:
            bounds.append(self.floor + other.max_weight())
        if other.floor is not None:
            bounds.append(other.floor + self.max_weight())
        floor = min(bounds) if bounds else None
        out: Dict[Tuple[int, int], Any] = {}
        for (i1, j1), a in self.terms.items():
            for (i2, j2), b in other.terms.items():
                key = (i1 + i2, j1 + j2)
                if floor is not None and self.weight(key) < floor:
                    continue
                out[key] = out.get(key, 0) + a * b
        return GradedSeries(self.weights, out, floor)

    def __add__(self, other: "GradedSeries") -> "GradedSeries":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        floors = [f for f in (self.floor, other.floor) if f is not None]
        return GradedSeries(self.weights, out, min(floors) if floors else None)

    def scale(self, value: Any) -> "GradedSeries":
        return GradedSeries(self.weights, {k: v * value for k, v in self.terms.items()}, self.floor)

    @classmethod
    def inverse_of(cls, poly: LaurentPoly, weights: Tuple[int, int], floor: int) -> "GradedSeries":
        """1/poly = LT^-1 * sum_k (-R)^k with R = (poly - LT)/LT of strictly negative weight"""
        grid = _poly_to_grid(poly)
        if not grid:
            raise NotInvertibleInRegion("cannot invert zero")
        weight = lambda key: weights[0] * key[0] + weights[1] * key[1]
        top = max(weight(k) for k in grid)
        leaders = [k for k in grid if weight(k) == top]
        if len(leaders) != 1:
            raise NotInvertibleInRegion(f"leading term of {poly} is not unique for weights {weights}")
        lead_key = leaders[0]
        lead_inv = _invert_scalar(grid[lead_key])
        rest = {
            (i - lead_key[0], j - lead_key[1]): -(v * lead_inv)
            for (i, j), v in grid.items()
            if (i, j) != lead_key
        }
        # sum_k rest^k restricted to weights >= floor + top
        local_floor = floor + top
        result: Dict[Tuple[int, int], Any] = {(0, 0): Fraction(1)}
        power: Dict[Tuple[int, int], Any] = {(0, 0): Fraction(1)}
        while power:
            nxt: Dict[Tuple[int, int], Any] = {}
            for (i1, j1), a in power.items():
                for (i2, j2), b in rest.items():
                    key = (i1 + i2, j1 + j2)
                    if weight(key) < local_floor:
                        continue
                    nxt[key] = nxt.get(key, 0) + a * b
            power = {k: v for k, v in nxt.items() if not _is_zero(v)}
            for k, v in power.items():
                result[k] = result.get(k, 0) + v
        terms = {
            (i - lead_key[0], j - lead_key[1]): _simplify(v * lead_inv) for (i, j), v in result.items()
        }
        return cls(weights, terms, floor)

    def window(self) -> int:
        span = abs(self.weights[0]) + abs(self.weights[1])
        if self.floor is None or span == 0:
            return max((max(abs(i), abs(j)) for i, j in self.terms), default=0)
        return (-self.floor) // span


def floor_for_window(weights: Tuple[int, int], window: int) -> int:
    return -(abs(weights[0]) + abs(weights[1])) * window


def expand_graded(
    numerator: LaurentPoly, denominator: LaurentPoly, weights: Tuple[int, int], floor: int
) -> GradedSeries:
    num = GradedSeries.from_poly(numerator, weights)
    inv = GradedSeries.inverse_of(denominator, weights, floor - num.max_weight())
    return num * inv


def expand_rational(
    numerator: LaurentPoly, denominator: LaurentPoly, region: Region, window: int
) -> "BiLaurentSeries":
    """Expand numerator/denominator in the region, exact inside the window box"""
    weights = region.weights()
    graded = expand_graded(numerator, denominator, weights, floor_for_window(weights, window))
    return BiLaurentSeries.from_graded(graded, window, region)


# ==================== Boxed bi-Laurent series ====================


Key = Tuple[int, int, int]


class BiLaurentSeries:
    """
    Terms keyed (z exponent, w exponent, p exponent).

    Entries with |z|, |w| <= window and p exponent <= order are exact.
    """

    def __init__(
        self,
        terms: Dict[Key, Any],
        window: int,
        order: int = 0,
        tags: Optional[Dict[str, RegionTag]] = None,
        finite: bool = False,
        graded: Optional[GradedSeries] = None,
    ):
        self.window = window
        self.order = order
        self.tags = dict(tags or {})
        self.finite = finite
        self.graded = graded
        self.terms: Dict[Key, Any] = {
            k: v
            for k, v in terms.items()
            if not _is_zero(v) and k[2] <= order and (finite or (abs(k[0]) <= window and abs(k[1]) <= window))
        }

    # ==================== Constructors ====================

    @classmethod
    def from_graded(cls, graded: GradedSeries, window: int, region: Region) -> "BiLaurentSeries":
        window = min(window, graded.window())
        terms = {(i, j, 0): v for (i, j), v in graded.terms.items()}
        return cls(terms, window, 0, region.tags(), graded=graded)

    @classmethod
    def from_poly(cls, poly: LaurentPoly, window: int, order: int = 0) -> "BiLaurentSeries":
        """Finite series from a Laurent polynomial in z, w and p"""
        terms: Dict[Key, Any] = {}
        for mono, c in poly.items():
            key = (mono.exponent("z"), mono.exponent("w"), mono.exponent("p"))
            rest = mono.without("z").without("w").without("p")
            value = LaurentPoly.monomial(rest, c)
            terms[key] = terms.get(key, LaurentPoly.zero()) + value
        terms = {k: _simplify(v) for k, v in terms.items()}
        return cls(terms, window, order, finite=True)

    @classmethod
    def constant(cls, value: Any, window: int, order: int = 0) -> "BiLaurentSeries":
        return cls({(0, 0, 0): value}, window, order, finite=True)

    # ==================== Inspection ====================

    def variables(self) -> List[str]:
        names = []
        if any(k[0] != 0 for k in self.terms):
            names.append("z")
        if any(k[1] != 0 for k in self.terms):
            names.append("w")
        return names

    def spread(self) -> Tuple[int, int]:
        zs = [abs(k[0]) for k in self.terms] or [0]
        ws = [abs(k[1]) for k in self.terms] or [0]
        return (max(zs), max(ws))

    def coefficient(self, z_exp: int, w_exp: int) -> PSeries:
        return PSeries(
            {k[2]: v for k, v in self.terms.items() if k[0] == z_exp and k[1] == w_exp}, self.order
        )

    def is_zero(self) -> bool:
        return not self.terms

    def min_p(self) -> int:
        return min((k[2] for k in self.terms), default=0)

    def crop(self, window: Optional[int] = None, order: Optional[int] = None) -> "BiLaurentSeries":
        window = self.window if window is None else min(window, self.window)
        order = self.order if order is None else min(order, self.order)
        return BiLaurentSeries(self.terms, window, order, self.tags)

    def restrict(self, keep: Callable[[int, int], bool]) -> "BiLaurentSeries":
        """The entries whose (z, w) exponents pass keep"""
        terms = {k: v for k, v in self.terms.items() if keep(k[0], k[1])}
        return BiLaurentSeries(terms, self.window, self.order, self.tags, self.finite)

    def map(self, fn: Callable[[Any], Any]) -> "BiLaurentSeries":
        return BiLaurentSeries(
            {k: fn(v) for k, v in self.terms.items()}, self.window, self.order, self.tags, self.finite
        )

    # ==================== Arithmetic ====================

    def __add__(self, other: "BiLaurentSeries") -> "BiLaurentSeries":
        window = min(self.window, other.window)
        order = min(self.order, other.order)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        finite = self.finite and other.finite
        return BiLaurentSeries(out, window, order, {**other.tags, **self.tags}, finite)

    def __neg__(self) -> "BiLaurentSeries":
        return self.map(lambda v: -v)

    def __sub__(self, other: "BiLaurentSeries") -> "BiLaurentSeries":
        return self + (-other)

    def scale(self, value: Any, z_shift: int = 0, w_shift: int = 0, p_shift: int = 0) -> "BiLaurentSeries":
        """Multiply by value * z^z_shift * w^w_shift * p^p_shift"""
        terms = {(a + z_shift, b + w_shift, k + p_shift): v * value for (a, b, k), v in self.terms.items()}
        window = self.window if self.finite else self.window - max(abs(z_shift), abs(w_shift))
        return BiLaurentSeries(terms, window, self.order + p_shift, self.tags, self.finite)

    # ==================== Comparison ====================

    def keys_in_window(self, other: "BiLaurentSeries") -> List[Key]:
        window = min(self.window, other.window)
        order = min(self.order, other.order)
        keys = {
            k
            for k in set(self.terms) | set(other.terms)
            if abs(k[0]) <= window and abs(k[1]) <= window and k[2] <= order
        }
        return sorted(keys, key=lambda k: (k[2], k[0], k[1]))

    def first_mismatch(self, other: "BiLaurentSeries") -> Optional[Tuple[Key, Any, Any]]:
        for key in self.keys_in_window(other):
            lhs = self.terms.get(key, 0)
            rhs = other.terms.get(key, 0)
            if lhs != rhs:
                return key, lhs, rhs
        return None

    def __repr__(self) -> str:
        return f"BiLaurentSeries({len(self.terms)} terms, window={self.window}, order={self.order})"


# ==================== Formal delta ====================


@dataclass(frozen=True)
class FormalDelta:
    """delta(w/(x0 z)) = sum_n (w/(x0 z))^n"""

    x0: Any = Fraction(1)

    def series(self, window: int, order: int = 0) -> BiLaurentSeries:
        inv = _invert_scalar(self.x0)
        terms: Dict[Key, Any] = {}
        for n in range(-window, window + 1):
            terms[(-n, n, 0)] = _power(inv, n)
        tag = RegionTag(DISTRIBUTION, support=f"w = ({self.x0})*z")
        return BiLaurentSeries(terms, window, order, {"z": tag, "w": tag})

    def times(self, series: BiLaurentSeries) -> BiLaurentSeries:
        """delta(w/(x0 z)) * S(z); entry (a, b) equals x0^(-b) * S_(a+b)"""
        if any(k[1] != 0 for k in series.terms):
            raise IncompatibleRegions("delta times a series depending on w is not defined")
        inv = _invert_scalar(self.x0)
        window = series.window
        terms: Dict[Key, Any] = {}
        for (s, _, k), v in series.terms.items():
            for b in range(-window, window + 1):
                a = s - b
                if abs(a) <= window:
                    terms[(a, b, k)] = v * _power(inv, b)
        # entries with |a + b| > series window are unknown
        half = window // 2 if not series.finite else window
        tag = RegionTag(DISTRIBUTION, support=f"w = ({self.x0})*z")
        return BiLaurentSeries(terms, half, series.order, {"z": tag, "w": tag})

    def substitute(self, series: BiLaurentSeries) -> BiLaurentSeries:
        """delta(w/(x0 z)) * S(w) = delta(w/(x0 z)) * S(x0 z) for S free of z"""
        if any(k[0] != 0 for k in series.terms):
            raise IncompatibleRegions("only a series in w alone can be moved onto the delta support")
        moved = {(b, 0, k): v * _power(self.x0, b) for (_, b, k), v in series.terms.items()}
        return self.times(BiLaurentSeries(moved, series.window, series.order, series.tags, series.finite))


def delta_substitute(delta: FormalDelta, series: BiLaurentSeries) -> BiLaurentSeries:
    return delta.substitute(series)


# coefficient selections taken from the series relations
BRACKETS: Dict[str, Callable[[int, int], bool]] = {
    "z<0 & w<0": lambda a, b: a < 0 and b < 0,
    "z<=0 & w<0": lambda a, b: a <= 0 and b < 0,
    "z<=0": lambda a, b: a <= 0,
    "z>=0": lambda a, b: a >= 0,
    "all": lambda a, b: True,
}


def bracket_extract(
    series: BiLaurentSeries, selection: Union[str, Callable[[int, int], bool]]
) -> Dict[Tuple[int, int], PSeries]:
    """The p-series at every (z, w) exponent the selection keeps"""
    if isinstance(selection, str):
        if selection not in BRACKETS:
            raise InvalidCombination(f"unknown bracket '{selection}', expected one of {sorted(BRACKETS)}")
        selection = BRACKETS[selection]
    cells = sorted({(a, b) for a, b, _ in series.restrict(selection).terms})
    return {cell: series.coefficient(*cell) for cell in cells}


def _power(value: Any, n: int) -> Any:
    if n >= 0:
        return value ** n
    return _invert_scalar(value) ** (-n)


# ==================== Products ====================


def series_mul(a: BiLaurentSeries, b: BiLaurentSeries) -> BiLaurentSeries:
    """
    Product of two boxed series.

    Defined when one factor is finite, when the variables are disjoint, or when
    both come from graded expansions with the same weight vector.
    """
    if a.graded is not None and b.graded is not None and a.graded.weights == b.graded.weights:
        if a.order == 0 and b.order == 0:
            graded = a.graded * b.graded
            region = Region(**{v: t for v, t in a.tags.items() if v in ("z", "w")})
            return BiLaurentSeries.from_graded(graded, min(a.window, b.window), region)
    if b.finite and not a.finite:
        a, b = b, a
    if a.finite:
        sz, sw = a.spread()
        window = b.window if b.finite else b.window - max(sz, sw)
        return _convolve(a, b, window, b.finite, {**b.tags})
    va, vb = set(a.variables()), set(b.variables())
    if not (va & vb):
        return _convolve(a, b, min(a.window, b.window), False, {**a.tags, **b.tags})
    raise IncompatibleRegions(
        f"cannot multiply series with tags {sorted(map(str, a.tags.values()))} and "
        f"{sorted(map(str, b.tags.values()))}"
    )


def _convolve(a: BiLaurentSeries, b: BiLaurentSeries, window: int, finite: bool, tags) -> BiLaurentSeries:
    va, vb = a.min_p(), b.min_p()
    order = min(a.order + vb, b.order + va)
    out: Dict[Key, Any] = {}
    for (i1, j1, k1), x in a.terms.items():
        for (i2, j2, k2), y in b.terms.items():
            key = (i1 + i2, j1 + j2, k1 + k2)
            if key[2] > order:
                continue
            if not finite and (abs(key[0]) > window or abs(key[1]) > window):
                continue
            out[key] = out.get(key, 0) + x * y
    return BiLaurentSeries(out, window, order, tags, finite)
