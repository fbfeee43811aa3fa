"""
The universal-class representation of the elliptic operators.

A state is an ordered list of operators applied to a seed class Psi(U) with
U = u1 + ... + ur and O_Delta = (1 - L1)(1 - L2), L1 L2 = q:

    e(z)  Psi(U) = Psi(U + z O_Delta) theta(zq/U)  |_(1-p)
    f(z)  Psi(U) = Psi(U - z O_Delta) theta(-z/U)  |_(1-p)
    h+(z) Psi(U) = Psi(U) theta(z(q - 1)/U)
    h-(z) Psi(U) = Psi(U) theta(zp(q - 1)/U)

The factor of an operator sees U shifted by every operator applied after it.
Kernels multiply the integrand before the |_(1-p) expansion.

Setting p = 0 turns theta(x) into 1 - x and |_(1-p) into the difference of
the expansions at infinity and at zero. Mixed poles are expanded
lexicographically: the variable of an h operator dominates, otherwise the
variable of the operator applied first.
"""

import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import product as cartesian
from typing import Any, Dict, List, Optional, Tuple

from engine.contour import annulus_residues, expand_difference, expand_on_torus
from engine.errors import GenericityViolation, InvalidCombination, UnsupportedPoleGeometry
from engine.kclass import KClass
from engine.kernels import RationalFunction, koszul_diagonal, p_zero, zeta_kernel
from engine.presentations import WordIdentity, explicit_relations
from engine.ring import LaurentPoly, Monomial
from engine.series import BiLaurentSeries, FormalDelta, Region
from engine.theta import NOME, AutomorphyFactor, ThetaRatio, theta_of_class


SEEDS = ("one", "theta")
OPERATOR_KINDS = ("e", "f", "hPlus", "hMinus")
SHIFT_SIGNS = {"e": 1, "f": -1, "hPlus": 0, "hMinus": 0}
H_KINDS = {"+": "hPlus", "-": "hMinus"}
ORDERS = ("red-blue", "blue-red")

# weight of the dominant variable in p = 0 lexicographic expansions
LEX_PRIORITY = 2

PASS, FAIL = "PASS", "FAIL"

Q_MONO = Monomial({"q1": 1, "q2": 1})

Mismatch = Tuple[Tuple[int, int, int], Any, Any]


# ==================== Parameters ====================


@dataclass(frozen=True)
class ParamSpec:
    """Numerical values of the equivariant parameters; L1 is specialized to q1"""

    p: Fraction
    q1: Fraction
    q2: Fraction
    us: Tuple[Fraction, ...]
    x1: Fraction
    seed: Optional[int] = None

    @property
    def rank(self) -> int:
        return len(self.us)

    @property
    def q(self) -> Fraction:
        return self.q1 * self.q2

    def values(self, with_nome: bool = True) -> Dict[str, Fraction]:
        values = {"q1": self.q1, "q2": self.q2, "x1": self.x1, "L1": self.q1}
        values.update({f"u{i}": u for i, u in enumerate(self.us, 1)})
        if with_nome:
            values[NOME] = self.p
        return values

    def resonance(self) -> Optional[str]:
        """A monomial in the parameters whose size is a power of p, if any"""
        if not (0 < self.p < 1 and 1 < self.q < 1 / self.p):
            return f"need 0 < p < 1 and 1 < |q| < 1/|p|, got p={self.p}, q={self.q}"
        if any(not self.p < u <= 1 for u in self.us):
            return "every u_i must lie in (|p|, 1]"
        names = [(f"u{i}", u) for i, u in enumerate(self.us, 1)]
        names += [("x1", self.x1), ("q1", self.q1), ("q2", self.q2)]
        powers = {self.p ** k for k in range(-3, 4)}
        for exps in cartesian((-1, 0, 1), repeat=len(names)):
            if not any(exps):
                continue
            value = Fraction(1)
            for (_, v), e in zip(names, exps):
                value *= v ** e
            if abs(value) in powers:
                mono = "*".join(f"{n}^{e}" for (n, _), e in zip(names, exps) if e)
                return f"|{mono}| = {abs(value)} is a power of p"
        return None

    @classmethod
    def sample(cls, seed: int, rank: int, attempts: int = 200) -> "ParamSpec":
        """Draw generic parameters, rejecting and resampling on resonances"""
        if not 1 <= rank <= 4:
            raise InvalidCombination(f"rank must be between 1 and 4, got {rank}")
        rng = random.Random(seed)
        for _ in range(attempts):
            spec = cls(
                p=Fraction(1, rng.randint(7, 11)),
                q1=Fraction(rng.randint(101, 120), 100),
                q2=Fraction(rng.randint(101, 120), 100),
                us=tuple(Fraction(n, 100) for n in rng.sample(range(75, 100), rank)),
                x1=Fraction(rng.randint(75, 99), 100),
                seed=seed,
            )
            if spec.resonance() is None:
                return spec
        raise GenericityViolation(f"no generic parameters for seed {seed} after {attempts} draws")

    def __str__(self) -> str:
        us = ", ".join(str(u) for u in self.us)
        return f"p={self.p} q1={self.q1} q2={self.q2} u=({us}) x1={self.x1}"


# ==================== Classes ====================


def diagonal_class() -> KClass:
    """O_Delta = 1 - q1 - q2 + q once L1 = q1"""
    return koszul_diagonal().substitute({"L1": Monomial.symbol("q1")})


def diagonal_euler() -> ThetaRatio:
    """Delta_*(1) = theta(L1) theta(L2)"""
    return theta_of_class(KClass.of(Monomial.symbol("q1"), Monomial.symbol("q2")))


def seed_class(seed: str, universal: KClass) -> ThetaRatio:
    if seed == "one":
        return ThetaRatio(1)
    if seed == "theta":
        return theta_of_class(universal, Monomial.symbol("x1").inverse())
    raise InvalidCombination(f"unknown seed state '{seed}'")


@dataclass(frozen=True)
class Operator:
    kind: str
    var: str

    def __post_init__(self):
        if self.kind not in OPERATOR_KINDS or self.var not in ("z", "w"):
            raise InvalidCombination(f"no operator {self.kind}({self.var})")

    def __str__(self) -> str:
        name = {"hPlus": "h+", "hMinus": "h-"}.get(self.kind, self.kind)
        return f"{name}({self.var})"


def operator_factor(op: Operator, universal: KClass, nome_scaled: bool = True) -> ThetaRatio:
    """The theta factor an operator contributes when it sees the class universal"""
    x = Monomial.symbol(op.var)
    dual = universal.dual()
    if op.kind == "e":
        return theta_of_class(dual, x * Q_MONO)
    if op.kind == "f":
        return theta_of_class(-dual, x)
    q_minus_one = KClass({Q_MONO: 1, Monomial.one(): -1})
    if op.kind == "hMinus" and nome_scaled:
        x = x * Monomial.symbol(NOME)
    return theta_of_class(dual * q_minus_one, x)


@dataclass(frozen=True)
class RepState:
    """Operators in order of application to the seed class"""

    seed: str = "one"
    rank: int = 1
    ops: Tuple[Operator, ...] = ()

    def apply(self, op: Operator) -> "RepState":
        return replace(self, ops=self.ops + (op,))

    @property
    def shifts(self) -> List[Tuple[str, int]]:
        return [(op.var, SHIFT_SIGNS[op.kind]) for op in self.ops if SHIFT_SIGNS[op.kind]]

    @property
    def expansions(self) -> Tuple[str, ...]:
        """Variables carrying |_(1-p), in the order the expansions are taken"""
        return tuple(op.var for op in self.ops if op.kind in ("e", "f"))

    def universal_after(self, start: int) -> KClass:
        """U shifted by the operators applied from position start on"""
        cls = KClass.tautological(self.rank)
        diagonal = diagonal_class()
        for op in self.ops[start:]:
            sign = SHIFT_SIGNS[op.kind]
            if sign > 0:
                cls = cls + diagonal.scaled(Monomial.symbol(op.var))
            elif sign < 0:
                cls = cls - diagonal.scaled(Monomial.symbol(op.var))
        return cls

    def integrand(self, nome_scaled: bool = True) -> ThetaRatio:
        total = seed_class(self.seed, self.universal_after(0))
        for i, op in enumerate(self.ops):
            total = total * operator_factor(op, self.universal_after(i + 1), nome_scaled)
        return total

    def __str__(self) -> str:
        ops = " ".join(str(op) for op in reversed(self.ops))
        seed = "1" if self.seed == "one" else "theta(U/x1)"
        return f"{ops} . {seed}" if ops else seed


def apply_e(state: RepState, var: str) -> RepState:
    return state.apply(Operator("e", var))


def apply_f(state: RepState, var: str) -> RepState:
    return state.apply(Operator("f", var))


def apply_h(sign: str, state: RepState, var: str) -> RepState:
    if sign not in H_KINDS:
        raise InvalidCombination(f"h sign must be + or -, got {sign}")
    return state.apply(Operator(H_KINDS[sign], var))


def compose_colored(red: str, blue: str, order: str = "red-blue", seed: str = "one", rank: int = 1) -> RepState:
    """
    red acts in z and blue in w. "red-blue" is red(z) blue(w), so blue is
    applied first; "blue-red" is blue(w) red(z).
    """
    if order not in ORDERS:
        raise InvalidCombination(f"unknown composition order {order}")
    state = RepState(seed, rank)
    first, second = (Operator(blue, "w"), Operator(red, "z"))
    if order == "blue-red":
        first, second = second, first
    return state.apply(first).apply(second)


def symmetric_form(seed: str, rank: int) -> ThetaRatio:
    """theta(zq/w) theta(wq/z) Psi(U + z O + w O) theta(zq/U) theta(wq/U)"""
    z, w = Monomial.symbol("z"), Monomial.symbol("w")
    universal = KClass.tautological(rank)
    diagonal = diagonal_class()
    shifted = universal + diagonal.scaled(z) + diagonal.scaled(w)
    return (
        ThetaRatio.theta(z * Q_MONO / w)
        * ThetaRatio.theta(w * Q_MONO / z)
        * seed_class(seed, shifted)
        * theta_of_class(universal.dual(), z * Q_MONO)
        * theta_of_class(universal.dual(), w * Q_MONO)
    )


def f_det_form(rank: int) -> Tuple[ThetaRatio, ThetaRatio]:
    """theta(-z/U) and (det U / (-z)^r) / theta(U/z)"""
    z = Monomial.symbol("z")
    universal = KClass.tautological(rank)
    det = LaurentPoly.monomial(universal.determinant()) * LaurentPoly.monomial(z, -1) ** (-rank)
    return theta_of_class(-universal.dual(), z), ThetaRatio(det) / theta_of_class(universal, z.inverse())


def h_automorphy(rank: int) -> AutomorphyFactor:
    state = RepState("one", rank, (Operator("hPlus", "z"),))
    return state.integrand().automorphy("z")


def divisible_by_diagonal(ratio: ThetaRatio) -> bool:
    """Whether the Koszul factor theta(L1) theta(L2) of Delta_* divides ratio"""
    quotient = ratio / diagonal_euler()
    return all(quotient.thetas.get(arg, 0) >= 0 for arg in diagonal_euler().thetas)


# ==================== Kernels in the model ====================


def colored_kernel(variant: str, argument: Monomial) -> ThetaRatio:
    """A sheaf-level elliptic kernel with red and blue q identified and L1 = q1"""
    body = zeta_kernel("elliptic", variant, colored=True).body
    q = LaurentPoly.monomial(Q_MONO)
    return body.substitute(
        {"x": LaurentPoly.monomial(argument), "qr": q, "qb": q, "L1": LaurentPoly.symbol("q1")}
    )


@dataclass
class Side:
    state: RepState
    kernel: ThetaRatio = field(default_factory=lambda: ThetaRatio(1))

    def integrand(self, nome_scaled: bool = True) -> ThetaRatio:
        return self.state.integrand(nome_scaled) * self.kernel

    def __str__(self) -> str:
        return str(self.state) if self.kernel == ThetaRatio(1) else f"[{self.state}] * {self.kernel}"


def relation_sides(
    relation: str, seed: str, rank: int, sign: str = "+", sign2: str = "+", perturbed: bool = False
) -> Tuple[Side, Side]:
    """
    Both sides of rel1 to rel4 and hh as states and kernels. perturbed swaps
    the rel1/rel2 kernels and inverts the rel3/rel4 ratio.
    """
    e, f = "e", "f"
    x_wz, x_zw = Monomial({"w": 1, "z": -1}), Monomial({"z": 1, "w": -1})
    state = RepState(seed, rank)

    if relation in ("rel1", "rel2"):
        minus = colored_kernel("tildeMinus", x_wz)
        plus = colored_kernel("tildePlus", x_zw)
        if perturbed:
            minus, plus = colored_kernel("tildePlus", x_zw), colored_kernel("tildeMinus", x_wz)
        if relation == "rel1":
            # e(z) e(w) tilde-(w/z) = e(w) e(z) tilde+(z/w)
            lhs = state.apply(Operator(e, "w")).apply(Operator(e, "z"))
            rhs = state.apply(Operator(e, "z")).apply(Operator(e, "w"))
        else:
            # f(w) f(z) tilde-(w/z) = f(z) f(w) tilde+(z/w)
            lhs = state.apply(Operator(f, "z")).apply(Operator(f, "w"))
            rhs = state.apply(Operator(f, "w")).apply(Operator(f, "z"))
        return Side(lhs, minus), Side(rhs, plus)

    if relation in ("rel3", "rel4"):
        h = Operator(H_KINDS[sign], "z")
        ratio = colored_kernel("ratioBackward" if perturbed else "ratioForward", x_zw)
        if relation == "rel3":
            # h(z) e(w) = e(w) h(z) zeta(z/w)/zeta(w/z)
            lhs = state.apply(Operator(e, "w")).apply(h)
            rhs = state.apply(h).apply(Operator(e, "w"))
        else:
            # f(w) h(z) = h(z) f(w) zeta(z/w)/zeta(w/z)
            lhs = state.apply(h).apply(Operator(f, "w"))
            rhs = state.apply(Operator(f, "w")).apply(h)
        return Side(lhs), Side(rhs, ratio)

    if relation == "hh":
        a, b = Operator(H_KINDS[sign], "z"), Operator(H_KINDS[sign2], "w")
        return Side(state.apply(b).apply(a)), Side(state.apply(a).apply(b))

    raise InvalidCombination(f"relation {relation} has no two-sided form in the representation")


# ==================== Outcomes ====================


@dataclass
class CheckOutcome:
    relation: str
    level: str
    seed_state: str
    rank: int
    order: int
    window: int
    status: str = PASS
    first_mismatch: Optional[Mismatch] = None
    unit: Optional[str] = None
    notes: List[str] = field(default_factory=list)

    def fail(self, mismatch: Mismatch, note: Optional[str] = None) -> "CheckOutcome":
        self.status = FAIL
        self.first_mismatch = mismatch
        if note:
            self.notes.append(note)
        return self


def _sign_pairs(relation: str) -> List[Tuple[str, str]]:
    if relation in ("rel3", "rel4"):
        return [("+", "+"), ("-", "+")]
    if relation == "hh":
        return [(a, b) for a in "+-" for b in "+-"]
    return [("+", "+")]


def _label(relation: str, sign: str, sign2: str) -> str:
    if relation in ("rel3", "rel4"):
        return f"{relation}{sign}"
    if relation == "hh":
        return f"hh{sign}{sign2}"
    return relation


# ==================== Elliptic checks ====================


def _compare_elliptic(lhs: Side, rhs: Side, params: ParamSpec, order: int, window: int, notes: List[str]) -> Optional[Mismatch]:
    values = params.values(with_nome=False)
    left = lhs.integrand().specialize(values)
    right = rhs.integrand().specialize(values)
    try:
        a = expand_difference(left, lhs.state.expansions, order, window, params.p)
        b = expand_difference(right, rhs.state.expansions, order, window, params.p)
    except UnsupportedPoleGeometry as err:
        notes.append(f"expansion not available: {err}")
        return (0, 0, 0), str(left), str(right)
    return a.first_mismatch(b)


def verify_elliptic_relation(
    relation: str,
    params: ParamSpec,
    order: int,
    window: int,
    seed: str = "one",
    perturbed: bool = False,
) -> CheckOutcome:
    """
    Expand both sides of an elliptic relation in the representation and
    compare them coefficientwise inside the window and up to p^order.
    """
    outcome = CheckOutcome(relation, "elliptic", seed, params.rank, order, window)
    if relation == "rel5":
        return _verify_rel5_elliptic(outcome, params, perturbed)
    for sign, sign2 in _sign_pairs(relation):
        lhs, rhs = relation_sides(relation, seed, params.rank, sign, sign2, perturbed)
        mismatch = _compare_elliptic(lhs, rhs, params, order, window, outcome.notes)
        if mismatch is not None:
            return outcome.fail(mismatch, f"{_label(relation, sign, sign2)}: {lhs} != {rhs}")
    if relation == "rel1" and not perturbed:
        lhs, _ = relation_sides(relation, seed, params.rank)
        symmetric = lhs.integrand() == symmetric_form(seed, params.rank)
        outcome.notes.append(f"symmetric form {'reproduced' if symmetric else 'not reproduced'}")
    return outcome


def _verify_rel5_elliptic(outcome: CheckOutcome, params: ParamSpec, perturbed: bool) -> CheckOutcome:
    """
    [f(z), e(w)] Psi as the sum over the poles x0 of zeta(x) with
    |p| < |x0| <= 1 of delta(w/(x0 z)) (-Res zeta dx/x) B(z, x0 z)|_(1-p),
    where f(z) e(w) Psi = zeta(w/z) B(z, w); against
    delta(z/w) Delta_*((h+(z) - h-(w))/theta(q)) Psi.
    """
    order, window, seed = outcome.order, outcome.window, outcome.seed_state
    values = params.values()
    numeric = params.values(with_nome=False)
    composition = compose_colored("f", "e", "red-blue", seed, params.rank)
    rest = composition.integrand() / colored_kernel("plain", Monomial({"w": 1, "z": -1}))
    for arg in list(rest.thetas) + list(rest.binomials):
        if {"z", "w"} <= set(arg.symbols()):
            raise UnsupportedPoleGeometry(f"factor {arg} mixes z and w after removing the kernel")

    kernel = colored_kernel("plain", Monomial.symbol("x"))
    z = LaurentPoly.symbol("z")
    lhs: Optional[BiLaurentSeries] = None
    for residue in annulus_residues(kernel, "x", values):
        x0 = residue.location
        weight = residue.value * (-(x0 ** -1))
        if perturbed:
            weight = -weight
        term = (rest.substitute({"w": x0 * z}) * weight).specialize(numeric)
        series = expand_difference(term, ["z"], order, window, params.p)
        where = x0.specialize(values)
        outcome.notes.append(
            f"residue at x = {x0}: {residue.value}" + ("; contributes zero" if series.is_zero() else "")
        )
        if where == 1 and not divisible_by_diagonal(weight):
            outcome.notes.append("residue at x = 1 is not supported on the diagonal")
        contribution = FormalDelta(where).times(series)
        lhs = contribution if lhs is None else lhs + contribution

    scalar = diagonal_euler() / ThetaRatio.theta(Q_MONO)
    h_plus = RepState(seed, params.rank, (Operator("hPlus", "z"),)).integrand() * scalar
    h_minus = RepState(seed, params.rank, (Operator("hMinus", "z"),)).integrand() * scalar
    plus = expand_on_torus(h_plus.specialize(numeric), order, window, params.p)
    minus = expand_on_torus(h_minus.specialize(numeric), order, window, params.p)
    rhs = FormalDelta(Fraction(1)).times(plus - minus)

    mismatch = lhs.first_mismatch(rhs)
    if mismatch is not None:
        return outcome.fail(mismatch, "[f(z), e(w)] != delta(z/w) Delta_*((h+(z) - h-(w))/theta(q))")
    return outcome


# ==================== The p = 0 model ====================


def _k_function(ratio: ThetaRatio, params: ParamSpec) -> RationalFunction:
    return p_zero(ratio.specialize(params.values(with_nome=False)))


def _k_expand(function: RationalFunction, state: RepState, window: int) -> BiLaurentSeries:
    """
    Sum of signed lexicographic expansions. The variable of an h operator
    dominates (h+ lives at infinity, h- at zero); otherwise the first applied
    variable does.
    """
    first = state.ops[0].var if state.ops else "z"
    first = next((op.var for op in state.ops if op.kind in H_KINDS.values()), first)
    choices: Dict[str, List[Tuple[bool, int]]] = {}
    for var in ("z", "w"):
        kinds = [op.kind for op in state.ops if op.var == var]
        if not kinds:
            choices[var] = [(True, 1)]
        elif kinds[0] in ("e", "f"):
            choices[var] = [(True, 1), (False, -1)]
        elif kinds[0] == "hPlus":
            choices[var] = [(True, 1)]
        else:
            choices[var] = [(False, 1)]
    priorities = {"z": 1, "w": 1, first: LEX_PRIORITY}
    total: Optional[BiLaurentSeries] = None
    for (z_outer, zs), (w_outer, ws) in cartesian(choices["z"], choices["w"]):
        region = Region.lex(z_outer, w_outer, w_priority=priorities["w"], z_priority=priorities["z"])
        part = function.expand(region, window)
        if zs * ws < 0:
            part = -part
        total = part if total is None else total + part
    return total


def k_state_series(state: RepState, params: ParamSpec, window: int, kernel: Optional[ThetaRatio] = None) -> BiLaurentSeries:
    ratio = state.integrand(nome_scaled=False)
    if kernel is not None:
        ratio = ratio * kernel
    return _k_expand(_k_function(ratio, params), state, window)


def _unit_between(lhs: BiLaurentSeries, rhs: BiLaurentSeries) -> Optional[Fraction]:
    for key in rhs.keys_in_window(lhs):
        b = rhs.terms.get(key, 0)
        if b != 0:
            return Fraction(lhs.terms.get(key, 0)) / Fraction(b)
    return None


def _scalar(value: Any, values: Dict[str, Fraction]) -> Fraction:
    if isinstance(value, RationalFunction):
        return value.numerator.specialize(values) / value.denominator.specialize(values)
    if isinstance(value, LaurentPoly):
        return value.specialize(values)
    return Fraction(value)


def _letter_exponent(kind: str, index: int) -> int:
    return index if kind == "hMinus" else -index


class WordEvaluator:
    """Values of words of length at most two in the p = 0 model"""

    def __init__(self, params: ParamSpec, seed: str, window: int, f_unit: Fraction = Fraction(1)):
        self.params = params
        self.seed = seed
        self.window = window
        self.f_unit = f_unit
        self._series: Dict[Tuple[str, ...], BiLaurentSeries] = {}

    def _composition(self, kinds: Tuple[str, ...]) -> BiLaurentSeries:
        if kinds not in self._series:
            ops = tuple(Operator(kind, var) for kind, var in zip(reversed(kinds), ("w", "z")[2 - len(kinds):]))
            state = RepState(self.seed, self.params.rank, ops)
            self._series[kinds] = k_state_series(state, self.params, self.window)
        return self._series[kinds]

    def value(self, word) -> Optional[Fraction]:
        """None when a letter lies outside the evaluation window"""
        if len(word) > 2:
            raise InvalidCombination(f"words of length {len(word)} are not evaluated")
        unit = self.f_unit ** sum(1 for letter in word if letter.kind == "f")
        if not word:
            seed = seed_class(self.seed, KClass.tautological(self.params.rank))
            return _scalar(p_zero(seed.specialize(self.params.values(with_nome=False))), {})
        exps = [_letter_exponent(letter.kind, letter.index) for letter in word]
        if any(abs(e) > self.window for e in exps):
            return None
        key = (exps[0], exps[1] if len(word) == 2 else 0, 0)
        kinds = tuple(letter.kind for letter in word)
        return Fraction(self._composition(kinds).terms.get(key, 0)) * unit

    def identity_value(self, identity: WordIdentity) -> Optional[Fraction]:
        values = self.params.values(with_nome=False)
        total = Fraction(0)
        for word, coeff in identity.combination.items():
            value = self.value(word)
            if value is None:
                return None
            total += _scalar(coeff, values) * value
        return total


def degenerate_to_k_theory(
    relation: str,
    params: ParamSpec,
    window: int,
    seed: str = "one",
    perturbed: bool = False,
) -> CheckOutcome:
    """
    The p = 0 model: series relations with the K-theoretic kernels, then the
    explicit coefficient identities of rel1, rel2 and rel5 on the same model.
    """
    outcome = CheckOutcome(relation, "ktheory", seed, params.rank, 0, window)
    f_unit = Fraction(1)
    if relation == "rel5":
        comp1 = compose_colored("f", "e", "red-blue", seed, params.rank)
        comp2 = compose_colored("f", "e", "blue-red", seed, params.rank)
        lhs = k_state_series(comp1, params, window) - k_state_series(comp2, params, window)
        scalar = Fraction((1 - params.q1) * (1 - params.q2)) / (1 - params.q)
        plus = k_state_series(RepState(seed, params.rank, (Operator("hPlus", "z"),)), params, window)
        minus = k_state_series(RepState(seed, params.rank, (Operator("hMinus", "z"),)), params, window)
        rhs = FormalDelta(Fraction(1)).times((plus - minus).map(lambda v: v * scalar))
        if perturbed:
            rhs = rhs.map(lambda v: 2 * v)
        unit = _unit_between(lhs, rhs)
        if unit is None or abs(unit) != 1:
            mismatch = lhs.first_mismatch(rhs) or ((0, 0, 0), "0", "0")
            return outcome.fail(mismatch, f"no unit relates the two sides (ratio {unit})")
        f_unit = unit
        outcome.unit = str(unit)
        mismatch = lhs.first_mismatch(rhs.map(lambda v: v * unit))
        if mismatch is not None:
            return outcome.fail(mismatch, "[f(z), e(w)] != delta(z/w) Delta_*((h+(z) - h-(w))/(1 - q))")
    else:
        for sign, sign2 in _sign_pairs(relation):
            lhs_side, rhs_side = relation_sides(relation, seed, params.rank, sign, sign2, perturbed)
            a = k_state_series(lhs_side.state, params, window, lhs_side.kernel)
            b = k_state_series(rhs_side.state, params, window, rhs_side.kernel)
            mismatch = a.first_mismatch(b)
            if mismatch is not None:
                return outcome.fail(mismatch, f"{_label(relation, sign, sign2)} at p = 0")

    if relation in ("rel1", "rel2", "rel5"):
        identity_window = max(1, window - 4)
        evaluator = WordEvaluator(params, seed, window, f_unit)
        checked = skipped = 0
        for identity in explicit_relations("trig", relation, window=identity_window, perturbed=perturbed):
            value = evaluator.identity_value(identity)
            if value is None:
                skipped += 1
                continue
            checked += 1
            if value != 0:
                label = tuple(x for x in identity.label if isinstance(x, int))
                n, m = (label + (0, 0))[:2]
                return outcome.fail(((n, m, 0), str(value), "0"), f"explicit identity {identity} fails")
        outcome.notes.append(f"{checked} explicit identities hold, {skipped} reach outside the window")
    return outcome
