"""
The rational, trigonometric and elliptic presentations as relation schemas.

A schema is a list of terms on each side. Each term is a product of
generating series in the ordered slots z, w times a kernel; extracting the
coefficient of z^A w^B of (lhs - rhs) gives one identity between words in
the generators. Kernels with denominators are cleared first, and every schema
records the factor it was cleared by.
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from engine.errors import InvalidCombination
from engine.kernels import (
    Q,
    Q1,
    Q2,
    REGION_MINUS,
    REGION_PLUS,
    T,
    T1,
    T2,
    RationalFunction,
    zeta_kernel,
)
from engine.ring import LaurentPoly, Monomial
from engine.series import BRACKETS, PSeries, _is_zero
from engine.theta import ThetaRatio, theta_truncated


LEVELS = ("rational", "trig", "elliptic")
RELATION_IDS = ("rel1", "rel2", "rel3", "rel4", "rel5", "hh")
KINDS = ("e", "f", "h", "hPlus", "hMinus")
TOKENS = {"e": "e", "f": "f", "h": "h", "hPlus": "hp", "hMinus": "hm"}


# ==================== Words ====================


@dataclass(frozen=True, order=True)
class GeneratorSymbol:
    kind: str
    index: int

    def __str__(self) -> str:
        return f"{TOKENS[self.kind]}[{self.index}]"


Word = Tuple[GeneratorSymbol, ...]


def _word_text(word: Word) -> str:
    return "*".join(str(g) for g in word) if word else "1"


class WordCombination:
    """Finite linear combination of words with coefficients in any commutative ring"""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Word, Any]] = None):
        self.terms: Dict[Word, Any] = {w: c for w, c in (terms or {}).items() if not _is_zero(c)}

    @classmethod
    def zero(cls) -> "WordCombination":
        return cls()

    @classmethod
    def word(cls, letters: Sequence[GeneratorSymbol], coeff: Any = 1) -> "WordCombination":
        return cls({tuple(letters): coeff})

    @classmethod
    def scalar(cls, coeff: Any) -> "WordCombination":
        return cls({(): coeff})

    @classmethod
    def commutator(cls, a: "WordCombination", b: "WordCombination") -> "WordCombination":
        return a * b - b * a

    def items(self) -> Iterator[Tuple[Word, Any]]:
        return iter(sorted(self.terms.items(), key=lambda item: item[0]))

    def words(self) -> List[Word]:
        return sorted(self.terms)

    def coefficient(self, word: Word) -> Any:
        return self.terms.get(tuple(word), 0)

    def is_zero(self) -> bool:
        return not self.terms

    def map(self, fn: Callable[[Any], Any]) -> "WordCombination":
        return WordCombination({w: fn(c) for w, c in self.terms.items()})

    def swap(self, a: str, b: str) -> "WordCombination":
        return self.map(lambda c: c.swap(a, b) if hasattr(c, "swap") else c)

    def __add__(self, other: "WordCombination") -> "WordCombination":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out[w] + c if w in out else c
        return WordCombination(out)

    def __neg__(self) -> "WordCombination":
        return self.map(lambda c: -c)

    def __sub__(self, other: "WordCombination") -> "WordCombination":
        return self + (-other)

    def __mul__(self, other) -> "WordCombination":
        if not isinstance(other, WordCombination):
            return self.map(lambda c: c * other)
        out: Dict[Word, Any] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                value = c1 * c2
                out[w] = out[w] + value if w in out else value
        return WordCombination(out)

    def __rmul__(self, other) -> "WordCombination":
        return self.map(lambda c: other * c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WordCombination):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for word, c in self.items():
            text = str(c)
            coeff = "" if text == "1" else (f"-" if text == "-1" else f"({text})*")
            parts.append(f"{coeff}{_word_text(word)}" if word else f"({text})")
        return " + ".join(parts)


# ==================== Generating series ====================


IDENTITY = "identity"


def series_letter(level: str, kind: str, exponent: int):
    """
    The coefficient of x^exponent in the generating series of kind at level:
    a GeneratorSymbol, IDENTITY for the constant 1 of h, or None for zero.
    """
    if level == "rational":
        if kind == "h" and exponent == 0:
            return IDENTITY
        if kind in ("e", "f", "h") and exponent <= -1:
            return GeneratorSymbol(kind, -exponent - 1)
        if kind in ("e", "f", "h"):
            return None
    elif level == "trig":
        if kind in ("e", "f"):
            return GeneratorSymbol(kind, -exponent)
        if kind == "hPlus":
            return GeneratorSymbol(kind, -exponent) if exponent <= 0 else None
        if kind == "hMinus":
            return GeneratorSymbol(kind, exponent) if exponent >= 0 else None
    elif level == "elliptic":
        if kind in ("e", "f", "hPlus", "hMinus"):
            return GeneratorSymbol(kind, -exponent)
    raise InvalidCombination(f"no generating series {kind} at level {level}")


def index_letter(level: str, kind: str, index: int):
    """The generator kind_index with the conventions h_-1 = 1 and h_<=-2 = 0 at the rational level"""
    if level == "rational":
        if index >= 0:
            return GeneratorSymbol(kind, index)
        if kind == "h" and index == -1:
            return IDENTITY
        return None
    if level == "trig" and kind in ("hPlus", "hMinus") and index < 0:
        return None
    return GeneratorSymbol(kind, index)


@dataclass(frozen=True)
class SeriesFactor:
    kind: str
    var: str

    def __str__(self) -> str:
        name = {"hPlus": "h+", "hMinus": "h-"}.get(self.kind, self.kind)
        return f"{name}({self.var})"


def product_coefficient(level: str, factors: Sequence[SeriesFactor], a: int, b: int) -> WordCombination:
    """Coefficient of z^a w^b in the ordered product of generating series"""
    letters = []
    for factor in factors:
        letter = series_letter(level, factor.kind, a if factor.var == "z" else b)
        if letter is None:
            return WordCombination.zero()
        if letter is not IDENTITY:
            letters.append(letter)
    return WordCombination.word(letters)


# ==================== Relation terms ====================


Grid = Dict[Tuple[int, int], Any]


def poly_grid(poly: LaurentPoly) -> Grid:
    """{(z exponent, w exponent): coefficient} of a polynomial in z, w and parameters"""
    grid: Grid = {}
    for mono, c in poly.items():
        key = (mono.exponent("z"), mono.exponent("w"))
        rest = LaurentPoly.monomial(mono.without("z").without("w"), c)
        grid[key] = grid.get(key, LaurentPoly.zero()) + rest
    return {k: v for k, v in grid.items() if not v.is_zero()}


def theta_grid(ratio: ThetaRatio, order: int) -> Grid:
    """
    A theta product with no denominators as {(z exponent, w exponent): p-series};
    each p-coefficient is a Laurent polynomial in z and w.
    """
    if ratio.binomials or any(e < 0 for e in ratio.thetas.values()):
        raise InvalidCombination(f"{ratio} is not a theta product")
    total = PSeries.constant(ratio.prefactor, order)
    for arg, e in ratio.thetas.items():
        total = total * theta_truncated(arg, order) ** e
    grid: Grid = {}
    for k, value in total.coeffs.items():
        for key, c in poly_grid(LaurentPoly.lift(value)).items():
            grid.setdefault(key, {})[k] = c
    return {key: PSeries(coeffs, order) for key, coeffs in grid.items()}


@dataclass
class KernelTerm:
    """kernel(z, w) * ordered product of generating series"""

    factors: Tuple[SeriesFactor, ...]
    grid: Grid

    def coefficient(self, level: str, a: int, b: int) -> WordCombination:
        total = WordCombination.zero()
        for (i, j), value in self.grid.items():
            words = product_coefficient(level, self.factors, a - i, b - j)
            if not words.is_zero():
                total = total + words * value
        return total


@dataclass
class DeltaTerm:
    """scalar * delta(z/w) * series(var)"""

    kind: str
    var: str
    scalar: Any

    def coefficient(self, level: str, a: int, b: int) -> WordCombination:
        letter = series_letter(level, self.kind, a + b)
        if letter is None:
            return WordCombination.zero()
        word = () if letter is IDENTITY else (letter,)
        return WordCombination.word(word, self.scalar)


@dataclass
class DividedDifferenceTerm:
    """scalar * (h(z) - h(w)) / (z - w), for a series with no positive powers"""

    kind: str
    scalar: Any

    def coefficient(self, level: str, a: int, b: int) -> WordCombination:
        # (z^-k - w^-k)/(z - w) = -sum_{i + j = k + 1, i, j >= 1} z^-i w^-j
        if a >= 0 or b >= 0:
            return WordCombination.zero()
        letter = series_letter(level, self.kind, a + b + 1)
        if letter is None or letter is IDENTITY:
            return WordCombination.zero()
        return WordCombination.word((letter,), -self.scalar)


# ==================== Schemas ====================


@dataclass
class RelationSchema:
    relation: str
    level: str
    statement: str
    lhs: List[Any]
    rhs: List[Any]
    bracket: Callable[[int, int], bool]
    label_map: Callable[[int, int], Tuple[int, int]]
    cleared_by: Any = 1
    sign: Optional[str] = None
    leading: Optional[Callable[[int, int], Tuple[GeneratorSymbol, GeneratorSymbol]]] = None
    kernel_window: int = 0

    def identity(self, n: int, m: int) -> WordCombination:
        """lhs - rhs at the coefficient labelled (n, m)"""
        a, b = self.label_map(n, m)
        if not self.bracket(a, b):
            return WordCombination.zero()
        total = WordCombination.zero()
        for term in self.lhs:
            total = total + term.coefficient(self.level, a, b)
        for term in self.rhs:
            total = total - term.coefficient(self.level, a, b)
        return total

    def __str__(self) -> str:
        return self.statement


@dataclass
class WordIdentity:
    relation: str
    level: str
    label: Tuple
    combination: WordCombination
    leading: Optional[Tuple[GeneratorSymbol, GeneratorSymbol]] = None

    def remainder(self) -> WordCombination:
        """The identity without the two words of its leading commutator"""
        if self.leading is None:
            return self.combination
        x, y = self.leading
        return WordCombination(
            {w: c for w, c in self.combination.terms.items() if w not in ((x, y), (y, x))}
        )

    def __str__(self) -> str:
        return f"{self.relation}{list(self.label)}: {self.combination} = 0"


def _label_map(level: str, sign: Optional[str] = None) -> Callable[[int, int], Tuple[int, int]]:
    if level == "rational":
        return lambda n, m: (-n - 1, -m - 1)
    if sign == "-":
        return lambda n, m: (n, -m)
    return lambda n, m: (-n, -m)


def _bracket(level: str, relation: str, sign: Optional[str]) -> Callable[[int, int], bool]:
    if level == "rational":
        return BRACKETS["z<=0 & w<0" if relation in ("rel3", "rel4") else "z<0 & w<0"]
    if relation in ("rel3", "rel4"):
        return BRACKETS["z<=0" if sign == "+" else "z>=0"]
    return BRACKETS["all"]


def _ratio_grid(level: str, sign: str, window: int) -> Grid:
    """zeta(z, w)/zeta(w, z) expanded in non-negative powers of w/z (+) or z/w (-)"""
    ratio = zeta_kernel(level, "ratioForward").body
    region = REGION_PLUS if sign == "+" else REGION_MINUS
    series = ratio.expand(region, window)
    return {(i, j): LaurentPoly.lift(v) for (i, j, _), v in series.terms.items()}


def _cleared_tilde_grids(level: str, order: int) -> Tuple[Grid, Grid]:
    """
    The two kernels of rel1 after clearing the common denominator:
    e(z) e(w) K1 = e(w) e(z) K2.
    """
    z, w = LaurentPoly.symbol("z"), LaurentPoly.symbol("w")
    if level == "rational":
        # -(z - w) * tilde(w - z) and (z - w) * tilde(z - w)
        y = z - w
        s = T1 ** 2 + T1 * T2 + T2 ** 2
        c = T1 * T2 * T
        return poly_grid(y ** 3 - s * y + c), poly_grid(y ** 3 - s * y - c)
    if level == "trig":
        # z w (z - w) * tilde(w/z) and z w (z - w) * tilde(z/w)
        k1 = (z - w * Q1) * (z - w * Q2) * (w - z * Q)
        k2 = -((w - z * Q1) * (w - z * Q2) * (z - w * Q))
        return poly_grid(k1), poly_grid(k2)
    # theta(w/z) * tilde(w/z) and theta(w/z) * tilde(z/w)
    x = Monomial({"w": 1, "z": -1})
    q1, q2, q = Monomial.symbol("q1"), Monomial.symbol("q2"), Monomial({"q1": 1, "q2": 1})
    th = ThetaRatio.theta
    k1 = th(x * q1) * th(x * q2) * th(q / x)
    k2 = th(q1 / x) * th(q2 / x) * th(x * q) * th(x) / th(x.inverse())
    return theta_grid(k1, order), theta_grid(k2, order)


def _scalar_theta(arg, order: int) -> PSeries:
    return theta_truncated(arg, order)


def relation_series(
    level: str,
    relation: str,
    sign: str = "+",
    window: int = 8,
    order: int = 4,
    perturbed: bool = False,
) -> RelationSchema:
    """
    The series relation (level, relation) as a schema.

    sign selects h+ or h- in rel3/rel4 above the rational level; window bounds
    the expansion of kernel ratios; order is the p-order of elliptic kernels.
    perturbed swaps the arguments of the rel1/rel2 kernels.
    """
    if level not in LEVELS or relation not in RELATION_IDS:
        raise InvalidCombination(f"unknown relation {level}/{relation}")
    F = SeriesFactor
    h_kind = "h" if level == "rational" else ("hPlus" if sign == "+" else "hMinus")
    use_sign = sign if relation in ("rel3", "rel4") and level != "rational" else None
    common = dict(
        bracket=_bracket(level, relation, use_sign),
        label_map=_label_map(level, use_sign),
        sign=use_sign,
        kernel_window=window,
    )
    one = {(0, 0): LaurentPoly.one()} if level != "elliptic" else {(0, 0): PSeries.constant(LaurentPoly.one(), order)}

    if relation in ("rel1", "rel2"):
        k1, k2 = _cleared_tilde_grids(level, order)
        if perturbed:
            k1, k2 = k2, k1
        kind = "e" if relation == "rel1" else "f"
        first = (F(kind, "z"), F(kind, "w")) if kind == "e" else (F(kind, "w"), F(kind, "z"))
        second = first[::-1]
        cleared = {"rational": "(z - w)", "trig": "z*w*(z - w)", "elliptic": "theta(w/z)"}[level]
        statement = (
            f"{first[0]} {first[1]} tilde(w, z) = {second[0]} {second[1]} tilde(z, w), cleared by {cleared}"
        )
        return RelationSchema(
            relation, level, statement, [KernelTerm(first, k1)], [KernelTerm(second, k2)], **common
        )

    if relation in ("rel3", "rel4"):
        if level == "elliptic":
            raise InvalidCombination(
                "elliptic rel3/rel4 coefficients are infinite sums; they are verified in the universal representation"
            )
        grid = _ratio_grid(level, sign, window)
        if perturbed:
            grid = {(j, i): v for (i, j), v in grid.items()}
        if relation == "rel3":
            lhs = [KernelTerm((F(h_kind, "z"), F("e", "w")), one)]
            rhs = [KernelTerm((F("e", "w"), F(h_kind, "z")), grid)]
            leading = lambda n, m: (GeneratorSymbol(h_kind, n), GeneratorSymbol("e", m))
            statement = f"{F(h_kind, 'z')} e(w) = e(w) {F(h_kind, 'z')} zeta(z, w)/zeta(w, z)"
        else:
            lhs = [KernelTerm((F("f", "w"), F(h_kind, "z")), one)]
            rhs = [KernelTerm((F(h_kind, "z"), F("f", "w")), grid)]
            leading = lambda n, m: (GeneratorSymbol("f", m), GeneratorSymbol(h_kind, n))
            statement = f"f(w) {F(h_kind, 'z')} = {F(h_kind, 'z')} f(w) zeta(z, w)/zeta(w, z)"
        return RelationSchema(relation, level, statement, lhs, rhs, leading=leading, **common)

    if relation == "hh":
        kinds = ("h",) if level == "rational" else ("hPlus", "hMinus")
        lhs = [KernelTerm((F(a, "z"), F(b, "w")), one) for a in kinds for b in kinds]
        rhs = [KernelTerm((F(b, "w"), F(a, "z")), one) for a in kinds for b in kinds]
        return RelationSchema(relation, level, "[h(z), h(w)] = 0", lhs, rhs, **common)

    # rel5
    leading = lambda n, m: (GeneratorSymbol("f", n), GeneratorSymbol("e", m))
    if level == "rational":
        cleared = T
        lhs = [
            KernelTerm((F("f", "z"), F("e", "w")), {(0, 0): cleared}),
            KernelTerm((F("e", "w"), F("f", "z")), {(0, 0): -cleared}),
        ]
        rhs = [DividedDifferenceTerm("h", T1 * T2)]
        statement = "t [f(z), e(w)] = t1 t2 (h(z) - h(w))/(z - w)"
    elif level == "trig":
        cleared = 1 - Q
        lhs = [
            KernelTerm((F("f", "z"), F("e", "w")), {(0, 0): cleared}),
            KernelTerm((F("e", "w"), F("f", "z")), {(0, 0): -cleared}),
        ]
        scalar = (1 - Q1) * (1 - Q2)
        rhs = [DeltaTerm("hPlus", "z", scalar), DeltaTerm("hMinus", "w", -scalar)]
        statement = "(1 - q) [f(z), e(w)] = (1 - q1)(1 - q2) delta(z/w) (h+(z) - h-(w))"
    else:
        q1, q2 = Monomial.symbol("q1"), Monomial.symbol("q2")
        cleared = _scalar_theta(q1 * q2, order)
        lhs = [
            KernelTerm((F("f", "z"), F("e", "w")), {(0, 0): cleared}),
            KernelTerm((F("e", "w"), F("f", "z")), {(0, 0): -cleared}),
        ]
        scalar = _scalar_theta(q1, order) * _scalar_theta(q2, order)
        rhs = [DeltaTerm("hPlus", "z", scalar), DeltaTerm("hMinus", "w", -scalar)]
        statement = "theta(q) [f(z), e(w)] = theta(q1) theta(q2) delta(z/w) (h+(z) - h-(w))"
    return RelationSchema(
        relation, level, statement, lhs, rhs, cleared_by=cleared, leading=leading, **common
    )


# ==================== Explicit relations ====================


def index_range(level: str, relation: str, window: int, sign: Optional[str] = None) -> Iterable[Tuple[int, int]]:
    """Labels (n, m) with |n|, |m| <= window in the index ranges of the generators"""
    if level == "rational":
        n_range = m_range = range(0, window + 1)
    else:
        n_range = m_range = range(-window, window + 1)
        if relation in ("rel3", "rel4") and level == "trig":
            n_range = range(0, window + 1)
    for n in n_range:
        for m in m_range:
            yield n, m


def relation_signs(level: str, relation: str) -> Tuple[str, ...]:
    if level == "trig" and relation in ("rel3", "rel4"):
        return ("+", "-")
    return ("+",)


def explicit_relations(
    level: str, relation: str, window: int = 6, order: int = 4, perturbed: bool = False
) -> List[WordIdentity]:
    """Every nonzero coefficient identity with labels inside the index window"""
    identities: List[WordIdentity] = []
    for sign in relation_signs(level, relation):
        schema = relation_series(level, relation, sign, window=window + 3, order=order, perturbed=perturbed)
        for n, m in index_range(level, relation, window, schema.sign):
            combination = schema.identity(n, m)
            if combination.is_zero():
                continue
            label = (n, m) if schema.sign is None else (schema.sign, n, m)
            leading = schema.leading(n, m) if schema.leading else None
            identities.append(WordIdentity(relation, level, label, combination, leading))
    return identities


# ==================== Comparison with stated forms ====================


@dataclass
class MatchResult:
    relation: str
    level: str
    status: str
    checked: int
    unit: Optional[str] = None
    first_mismatch: Optional[Dict[str, str]] = None
    notes: List[str] = field(default_factory=list)


def _as_function(value) -> RationalFunction:
    if isinstance(value, RationalFunction):
        return value
    return RationalFunction.of(value)


def _unit_ratio(engine: WordCombination, stated: WordCombination) -> Optional[RationalFunction]:
    """stated = unit * engine on the first word, provided the ratio is a signed monomial"""
    for word in engine.words():
        a = _as_function(engine.coefficient(word))
        b = _as_function(stated.coefficient(word))
        if b.is_zero():
            return None
        ratio = (b / a).reduced()
        if ratio.denominator == 1 and ratio.numerator.is_term():
            return ratio
        return None
    return None


def compare_identities(
    engine: WordCombination, stated: WordCombination, unit: Optional[RationalFunction] = None
) -> Tuple[bool, Optional[RationalFunction], Optional[Tuple[Word, Any, Any]]]:
    """
    Two identities agree when stated = u * engine. The unit u is taken from
    the first word unless one is given; returns (agree, u, first differing
    word with both coefficients).
    """
    if unit is None:
        unit = _unit_ratio(engine, stated) if not engine.is_zero() else RationalFunction.of(1)
    scale = unit if unit is not None else RationalFunction.of(1)
    words = sorted(set(engine.words()) | set(stated.words()))
    for word in words:
        a = _as_function(engine.coefficient(word)) * scale
        b = _as_function(stated.coefficient(word))
        if not (a == b):
            return False, unit, (word, a, b)
    return unit is not None, unit, None


def match_paper_explicit(
    level: str,
    relation: str,
    stated: Callable[[Tuple], WordCombination],
    window: int = 6,
    perturbed: bool = False,
) -> MatchResult:
    """
    Compare the extracted identities with stated forms. stated(label) returns
    the stated identity (lhs - rhs) for a label; it is multiplied by the
    factor the schema was cleared by before comparison.

    One unit serves the whole relation: it is fixed by the first identity
    that does not vanish and every other identity must agree with it.
    """
    if level not in ("rational", "trig"):
        raise InvalidCombination("stated explicit forms exist for the rational and trigonometric levels")
    checked = 0
    unit: Optional[RationalFunction] = None
    for sign in relation_signs(level, relation):
        schema = relation_series(level, relation, sign, window=window + 3, perturbed=perturbed)
        cleared = _as_function(schema.cleared_by)
        for n, m in index_range(level, relation, window, schema.sign):
            label = (n, m) if schema.sign is None else (schema.sign, n, m)
            engine = schema.identity(n, m)
            stated_form = stated(label).map(lambda c: (_as_function(c) * cleared).reduced())
            agree, found, mismatch = compare_identities(engine, stated_form, unit if not engine.is_zero() else None)
            checked += 1
            if unit is None and found is not None and not engine.is_zero():
                unit = found
            if not agree:
                detail = {"label": str(list(label))}
                if mismatch is not None:
                    word, a, b = mismatch
                    detail.update({"word": _word_text(word), "engine": str(a), "stated": str(b)})
                else:
                    detail.update({"word": "", "engine": str(engine), "stated": str(stated_form)})
                if unit is not None:
                    detail["unit"] = str(unit)
                return MatchResult(relation, level, "FAIL", checked, first_mismatch=detail)
    return MatchResult(relation, level, "PASS", checked, unit=str(unit) if unit is not None else "1")


def elliptic_reduces_to_trig(relation: str, window: int = 4, order: int = 2) -> Tuple[bool, Optional[Tuple]]:
    """
    At p^0 the cleared elliptic rel1/rel2 kernels are the trigonometric ones
    divided by z^2 w, so each elliptic identity labelled (n, m) reduces to the
    trigonometric identity labelled (n - 2, m - 1).
    """
    if relation not in ("rel1", "rel2"):
        raise InvalidCombination("the p = 0 comparison covers rel1 and rel2")
    elliptic = relation_series("elliptic", relation, order=order)
    trig = relation_series("trig", relation)
    for n, m in index_range("trig", relation, window):
        reduced = elliptic.identity(n, m).map(lambda c: c.coefficient(0))
        if reduced != trig.identity(n - 2, m - 1):
            return False, (n, m)
    return True, None
