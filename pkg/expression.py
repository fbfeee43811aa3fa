"""
Expression language for the engine.

Grammar:
    expr    :: term [ ('+' | '-') term ]*
    term    :: factor [ ('*' | '/') factor ]*
    factor  :: '-' factor | power
    power   :: atom [ '^' integer ]
    atom    :: integer | symbol | call | '(' expr ')'
    call    :: theta(expr) | binom(expr) | delta(expr)
             | zeta(level [, variant])(expr)
             | onep(expr [; var, ...])
             | bracket(expr; cond, ...)          cond :: z<0 | w>=0 | ...

Examples:
    theta(z*q1) / theta(z)
    zeta(trig)(w/z)
    onep(1/theta(u1/z); z)
    bracket(zeta(rational)(z - w); z<0, w<0)
    delta(w/z)
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as cartesian
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import pyparsing as pp

from engine.contour import expand_difference, expand_on_torus
from engine.errors import (
    EngineError,
    ExpressionSyntaxError,
    ExpressionTypeError,
    IncompatibleRegions,
)
from engine.kernels import LEVELS, VARIANTS, REGION_PLUS, RationalFunction, zeta_kernel
from engine.ring import LaurentPoly
from engine.series import BiLaurentSeries, FormalDelta, Region, delta_substitute, series_mul
from engine.theta import NOME, ThetaRatio


FUNCTIONS = ("theta", "binom", "zeta", "onep", "bracket", "delta")


# ==================== Tree ====================


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Sym:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Node", ...]
    options: Tuple[str, ...] = ()


Node = Union[Num, Sym, Neg, BinOp, Pow, Call]

PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2}


def _precedence(node: Node) -> int:
    if isinstance(node, BinOp):
        return PRECEDENCE[node.op]
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    return 5


def _wrap(node: Node, parens: bool) -> str:
    text = to_text(node)
    return f"({text})" if parens else text


def to_text(node: Node) -> str:
    """Canonical text; parse(to_text(t)) == t"""
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Sym):
        return node.name
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, _precedence(node.operand) < 3)
    if isinstance(node, Pow):
        return f"{_wrap(node.base, _precedence(node.base) < 5)}^{node.exponent}"
    if isinstance(node, BinOp):
        level = PRECEDENCE[node.op]
        left = _wrap(node.left, _precedence(node.left) < level)
        right = _wrap(node.right, _precedence(node.right) <= level)
        sep = f" {node.op} " if level == 1 else node.op
        return f"{left}{sep}{right}"
    inner = to_text(node.args[0])
    if node.name == "zeta":
        level, variant = node.options
        head = level if variant == "plain" else f"{level}, {variant}"
        return f"zeta({head})({inner})"
    if node.name in ("onep", "bracket"):
        return f"{node.name}({inner}; {', '.join(node.options)})"
    return f"{node.name}({inner})"


# ==================== Grammar ====================


def _fold(tokens):
    items = list(tokens[0])
    node = items[0]
    for op, right in zip(items[1::2], items[2::2]):
        node = BinOp(op, node, right)
    return node


def _build_grammar() -> pp.ParserElement:
    LPAR, RPAR, COMMA, SEMI = map(pp.Suppress, "(),;")
    expr = pp.Forward()

    integer = pp.Regex(r"\d+").set_parse_action(lambda t: Num(int(t[0])))
    keywords = pp.MatchFirst([pp.Keyword(f) for f in FUNCTIONS])
    symbol = (~keywords + pp.Regex(r"[A-Za-z][A-Za-z0-9_]*")).set_parse_action(lambda t: Sym(t[0]))

    def unary(name):
        return (pp.Keyword(name) + LPAR - expr + RPAR).set_parse_action(lambda t: Call(name, (t[1],)))

    level = pp.one_of(" ".join(LEVELS))
    variant = pp.one_of(" ".join(VARIANTS))
    zeta = (
        pp.Keyword("zeta") + LPAR - level + pp.Optional(COMMA + variant, default="plain") + RPAR
        + LPAR + expr + RPAR
    ).set_parse_action(lambda t: Call("zeta", (t[3],), (t[1], t[2])))

    var = pp.one_of("z w")
    onep = (
        pp.Keyword("onep") + LPAR - expr + pp.Optional(SEMI + pp.Group(pp.DelimitedList(var)), default=["z"])
        + RPAR
    ).set_parse_action(lambda t: Call("onep", (t[1],), tuple(t[2])))

    condition = pp.Regex(r"[zw]\s*[<>]=?\s*0").set_parse_action(lambda t: t[0].replace(" ", ""))
    bracket = (
        pp.Keyword("bracket") + LPAR - expr + SEMI + pp.Group(pp.DelimitedList(condition)) + RPAR
    ).set_parse_action(lambda t: Call("bracket", (t[1],), tuple(t[2])))

    call = unary("theta") | unary("binom") | unary("delta") | zeta | onep | bracket
    atom = integer | call | symbol | (LPAR + expr + RPAR)

    power = (atom + pp.Optional(pp.Suppress("^") + pp.Regex(r"-?\d+"))).set_parse_action(
        lambda t: Pow(t[0], int(t[1])) if len(t) > 1 else t[0]
    )
    factor = pp.Forward()
    factor <<= (pp.Suppress("-") + factor).set_parse_action(lambda t: Neg(t[0])) | power
    term = pp.Group(factor + pp.ZeroOrMore(pp.one_of("* /") + factor)).set_parse_action(_fold)
    expr <<= pp.Group(term + pp.ZeroOrMore(pp.one_of("+ -") + term)).set_parse_action(_fold)
    return expr


_GRAMMAR: Optional[pp.ParserElement] = None


def parse(text: str) -> Node:
    global _GRAMMAR
    if _GRAMMAR is None:
        _GRAMMAR = _build_grammar()
    try:
        return _GRAMMAR.parse_string(text, parse_all=True)[0]
    except pp.ParseBaseException as e:
        raise ExpressionSyntaxError(
            f"syntax error at column {e.col}: {e.msg}", column=e.col, expected=e.msg
        ) from e


# ==================== Evaluation ====================


def _is_series(value: Any) -> bool:
    return isinstance(value, (BiLaurentSeries, FormalDelta))


class Evaluator:
    """
    Symbolic values are LaurentPoly, ThetaRatio, RationalFunction or kernel
    bodies; onep, bracket and delta produce series at the given truncation.
    """

    def __init__(self, values: Optional[Mapping[str, Fraction]] = None, order: int = 4, window: int = 6):
        self.values = dict(values or {})
        self.order = order
        self.window = window

    def evaluate(self, node: Node) -> Any:
        if isinstance(node, Num):
            return LaurentPoly.constant(node.value)
        if isinstance(node, Sym):
            return LaurentPoly.symbol(node.name)
        if isinstance(node, Neg):
            value = self.evaluate(node.operand)
            if isinstance(value, FormalDelta):
                value = value.series(self.window)
            return -value
        if isinstance(node, Pow):
            return self._power(self.evaluate(node.base), node.exponent)
        if isinstance(node, BinOp):
            left, right = self.evaluate(node.left), self.evaluate(node.right)
            if node.op in "+-":
                return self._add(left, right, node.op)
            if node.op == "*":
                return self._mul(left, right)
            return self._div(left, right)
        return getattr(self, f"_call_{node.name}")(node)

    # ---------- arithmetic ----------

    def _add(self, a, b, op: str):
        if isinstance(a, ThetaRatio) or isinstance(b, ThetaRatio):
            raise ExpressionTypeError("theta ratios can be multiplied but not added")
        if _is_series(a) or _is_series(b):
            a, b = self._as_series(a), self._as_series(b)
            return a + b if op == "+" else a - b
        if isinstance(a, RationalFunction) or isinstance(b, RationalFunction):
            a, b = RationalFunction.of(a), RationalFunction.of(b)
        return a + b if op == "+" else a - b

    def _mul(self, a, b):
        if isinstance(a, FormalDelta) or isinstance(b, FormalDelta):
            delta, other = (a, b) if isinstance(a, FormalDelta) else (b, a)
            series = self._as_series(other)
            try:
                if series.variables() == ["w"]:
                    return delta_substitute(delta, series)
                return delta.times(series)
            except IncompatibleRegions as e:
                raise ExpressionTypeError(str(e)) from e
        if _is_series(a) or _is_series(b):
            try:
                return series_mul(self._as_series(a), self._as_series(b))
            except IncompatibleRegions as e:
                raise ExpressionTypeError(f"cannot multiply series from different regions: {e}") from e
        if isinstance(a, ThetaRatio) or isinstance(b, ThetaRatio):
            if isinstance(a, RationalFunction) or isinstance(b, RationalFunction):
                raise ExpressionTypeError("cannot multiply a theta ratio by a rational function")
            return a * b if isinstance(a, ThetaRatio) else b * a
        if isinstance(a, RationalFunction) or isinstance(b, RationalFunction):
            return RationalFunction.of(a) * RationalFunction.of(b)
        return a * b

    def _div(self, a, b):
        if _is_series(b):
            raise ExpressionTypeError("division by a series is not defined")
        if isinstance(b, ThetaRatio):
            if isinstance(a, RationalFunction) or _is_series(a):
                raise ExpressionTypeError(f"cannot divide {type(a).__name__} by a theta ratio")
            return ThetaRatio(a) / b if not isinstance(a, ThetaRatio) else a / b
        if _is_series(a):
            if not (isinstance(b, LaurentPoly) and b.is_term()):
                raise ExpressionTypeError("series can only be divided by monomials")
            return self._mul(a, b ** -1)
        if isinstance(a, ThetaRatio):
            if not (isinstance(b, LaurentPoly) and b.is_term()):
                raise ExpressionTypeError("theta ratios can only be divided by monomials and theta ratios")
            return a * b ** -1
        if isinstance(a, LaurentPoly) and isinstance(b, LaurentPoly) and b.is_term():
            return a * b ** -1
        return RationalFunction.of(a) / RationalFunction.of(b)

    def _power(self, base, n: int):
        if isinstance(base, LaurentPoly) and n < 0 and not base.is_term():
            return RationalFunction(LaurentPoly.one(), base ** (-n))
        if isinstance(base, RationalFunction):
            result = RationalFunction.of(1)
            for _ in range(abs(n)):
                result = result * base
            return result if n >= 0 else result.inverse()
        if _is_series(base):
            raise ExpressionTypeError("powers of series are not defined")
        return base ** n

    def _as_series(self, value) -> BiLaurentSeries:
        if isinstance(value, BiLaurentSeries):
            return value
        if isinstance(value, FormalDelta):
            return value.series(self.window, self.order)
        if isinstance(value, LaurentPoly):
            return BiLaurentSeries.from_poly(value.partial_specialize(self._numeric()), self.window, self.order)
        raise ExpressionTypeError(f"{type(value).__name__} has no series expansion here; wrap it in onep or bracket")

    def _numeric(self) -> Dict[str, Fraction]:
        return {s: v for s, v in self.values.items() if s != NOME}

    # ---------- calls ----------

    def _monomial_argument(self, node: Node) -> LaurentPoly:
        value = self.evaluate(node)
        if not (isinstance(value, LaurentPoly) and value.is_term()):
            raise ExpressionTypeError(f"argument {to_text(node)} must be a monomial")
        return value

    def _call_theta(self, node: Call) -> ThetaRatio:
        return ThetaRatio.theta(self._monomial_argument(node.args[0]))

    def _call_binom(self, node: Call) -> ThetaRatio:
        return ThetaRatio.binomial(self._monomial_argument(node.args[0]))

    def _call_zeta(self, node: Call):
        level, variant = node.options
        argument = self.evaluate(node.args[0])
        if not isinstance(argument, LaurentPoly):
            raise ExpressionTypeError("kernel arguments are Laurent polynomials")
        try:
            return zeta_kernel(level, variant).at(argument)
        except EngineError as e:
            raise ExpressionTypeError(str(e)) from e

    def _call_delta(self, node: Call) -> FormalDelta:
        c, mono = self._monomial_argument(node.args[0]).single_term()
        if (mono.exponent("z"), mono.exponent("w")) == (-1, 1) and len(mono.symbols()) == 2:
            return FormalDelta(1 / c)
        if (mono.exponent("z"), mono.exponent("w")) == (1, -1) and len(mono.symbols()) == 2:
            return FormalDelta(c)
        raise ExpressionTypeError(f"delta needs c*w/z or c*z/w, got {to_text(node.args[0])}")

    def _call_onep(self, node: Call) -> BiLaurentSeries:
        value = self.evaluate(node.args[0])
        variables = list(node.options)
        if isinstance(value, ThetaRatio):
            if NOME not in self.values:
                raise ExpressionTypeError("onep of a theta ratio needs a numeric p")
            ratio = value.specialize(self._numeric())
            return expand_difference(ratio, variables, self.order, self.window, self.values[NOME])
        if isinstance(value, (LaurentPoly, RationalFunction)):
            function = RationalFunction.of(value).substitute(
                {s: LaurentPoly.constant(v) for s, v in self._numeric().items()}
            )
            return _infinity_minus_zero(function, variables, self.window)
        raise ExpressionTypeError(f"onep is not defined on {type(value).__name__}")

    def _call_bracket(self, node: Call) -> BiLaurentSeries:
        value = self.evaluate(node.args[0])
        if isinstance(value, ThetaRatio):
            if NOME not in self.values:
                raise ExpressionTypeError("bracket of a theta ratio needs a numeric p")
            series = expand_on_torus(value.specialize(self._numeric()), self.order, self.window, self.values[NOME])
        elif isinstance(value, (LaurentPoly, RationalFunction)):
            series = RationalFunction.of(value).expand(REGION_PLUS, self.window)
        elif isinstance(value, BiLaurentSeries):
            series = value
        else:
            raise ExpressionTypeError(f"bracket is not defined on {type(value).__name__}")
        keep = [_condition(c) for c in node.options]
        return series.restrict(lambda a, b: all(test((a, b)) for test in keep))


def _condition(text: str):
    index = 0 if text[0] == "z" else 1
    op = text[1:-1]
    tests = {"<": lambda e: e < 0, "<=": lambda e: e <= 0, ">": lambda e: e > 0, ">=": lambda e: e >= 0}
    test = tests[op]
    return lambda key: test(key[index])


def _infinity_minus_zero(function: RationalFunction, variables, window: int) -> BiLaurentSeries:
    """p = 0 form of |_(1-p): expansion at infinity minus expansion at zero in each variable"""
    choices = {v: [(True, 1), (False, -1)] if v in variables else [(True, 1)] for v in ("z", "w")}
    w_priority = 2 if variables and variables[0] == "w" else 1
    total: Optional[BiLaurentSeries] = None
    for (z_outer, zs), (w_outer, ws) in cartesian(choices["z"], choices["w"]):
        part = function.expand(Region.lex(z_outer, w_outer, w_priority=w_priority), window)
        if zs * ws < 0:
            part = -part
        total = part if total is None else total + part
    return total


def evaluate(text: str, values: Optional[Mapping[str, Fraction]] = None, order: int = 4, window: int = 6) -> Any:
    return Evaluator(values, order, window).evaluate(parse(text))
