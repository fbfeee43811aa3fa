from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from engine.errors import ExpressionSyntaxError, ExpressionTypeError
from engine.kernels import LEVELS, RationalFunction
from engine.ring import LaurentPoly
from engine.series import BiLaurentSeries, FormalDelta
from engine.theta import AutomorphyFactor, ThetaRatio
from expression import BinOp, Call, Neg, Num, Pow, Sym, evaluate, parse, to_text

z, w, q1 = LaurentPoly.symbol("z"), LaurentPoly.symbol("w"), LaurentPoly.symbol("q1")

NAMES = ["z", "w", "q1", "t2", "u1", "x1"]


def trees():
    leaves = st.one_of(st.builds(Num, st.integers(0, 50)), st.builds(Sym, st.sampled_from(NAMES)))

    def extend(children):
        unary = st.sampled_from(["theta", "binom", "delta"])
        levels = st.sampled_from(LEVELS)
        plain_variants = st.sampled_from(["plain", "tilde", "ratioForward", "ratioBackward"])
        conditions = st.lists(st.sampled_from(["z<0", "z<=0", "w>0", "w>=0"]), min_size=1, max_size=2)
        return st.one_of(
            st.builds(Neg, children),
            st.builds(BinOp, st.sampled_from("+-*/"), children, children),
            st.builds(Pow, children, st.integers(-3, 3)),
            st.builds(lambda name, arg: Call(name, (arg,)), unary, children),
            st.builds(lambda lv, var, arg: Call("zeta", (arg,), (lv, var)), levels, plain_variants, children),
            st.builds(
                lambda arg, vs: Call("onep", (arg,), tuple(vs)),
                children,
                st.sampled_from([["z"], ["w"], ["z", "w"]]),
            ),
            st.builds(lambda arg, cs: Call("bracket", (arg,), tuple(cs)), children, conditions),
        )

    return st.recursive(leaves, extend, max_leaves=12)


@settings(max_examples=1000, deadline=None)
@given(trees())
def test_print_parse_round_trip(tree):
    assert parse(to_text(tree)) == tree


def test_parse_precedence():
    assert parse("a + b*c^2") == BinOp("+", Sym("a"), BinOp("*", Sym("b"), Pow(Sym("c"), 2)))
    assert parse("-x^2") == Neg(Pow(Sym("x"), 2))
    assert parse("a - b - c") == BinOp("-", BinOp("-", Sym("a"), Sym("b")), Sym("c"))
    assert parse("zeta(trig, tilde)(w/z)") == Call("zeta", (BinOp("/", Sym("w"), Sym("z")),), ("trig", "tilde"))
    assert parse("onep(theta(z))") == Call("onep", (Call("theta", (Sym("z"),)),), ("z",))


def test_unclosed_call_reports_column():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse("theta(z")
    assert info.value.column == 8


@pytest.mark.parametrize("text", ["", "z +", "zeta(quantum)(z)", "bracket(z; x<0)", "2^z", "theta"])
def test_syntax_errors(text):
    with pytest.raises(ExpressionSyntaxError):
        parse(text)


def test_theta_ratio_and_automorphy():
    value = evaluate("theta(z*q1) / theta(z)")
    assert isinstance(value, ThetaRatio)
    assert value.automorphy("z") == AutomorphyFactor(0, q1)


def test_kernel_evaluation():
    value = evaluate("zeta(trig)(w/z)")
    assert isinstance(value, RationalFunction)
    q2 = LaurentPoly.symbol("q2")
    x = w * z ** -1
    assert value == RationalFunction((1 - x * q1) * (1 - x * q2), (1 - x) * (1 - x * q1 * q2))


def test_polynomial_arithmetic():
    assert evaluate("(z + w)^2 - z*(z + 2*w)") == w ** 2
    assert evaluate("1/(1 - z)") == RationalFunction(LaurentPoly.one(), 1 - z)


def test_delta_evaluation():
    assert evaluate("delta(w/z)") == FormalDelta(Fraction(1))
    assert evaluate("delta(2*z/w)") == FormalDelta(Fraction(2))


def test_series_evaluation():
    series = evaluate("onep(1/(1 - z*u1); z)", {"u1": Fraction(1, 2)}, window=4)
    assert isinstance(series, BiLaurentSeries)
    # expansion at infinity minus expansion at zero of 1/(1 - z/2)
    assert series.coefficient(0, 0).coefficient(0) == -1
    assert series.coefficient(2, 0).coefficient(0) == -Fraction(1, 4)
    assert series.coefficient(-1, 0).coefficient(0) == -2


def test_bracket_keeps_selected_exponents():
    series = evaluate("bracket(1/(z - w); z<0, w>=0)", window=5)
    assert all(k[0] < 0 and k[1] >= 0 for k in series.terms)
    assert series.coefficient(-2, 1).coefficient(0) == 1


@pytest.mark.parametrize(
    "text",
    ["theta(z) + theta(w)", "theta(z + w)", "delta(z*w)", "theta(z) * zeta(trig)(z)", "onep(theta(z); z)"],
)
def test_type_errors(text):
    with pytest.raises(ExpressionTypeError):
        evaluate(text)
