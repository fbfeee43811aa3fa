import pytest

from engine.errors import InvalidCombination
from engine.kernels import (
    LEVELS,
    RationalFunction,
    degenerate,
    gamma_coefficients,
    p_zero,
    sheaf_gamma_expansion,
    zeta_colored_symmetric,
    zeta_kernel,
)
from engine.ring import LaurentPoly, is_divisible
from engine.theta import ThetaRatio

t1, t2 = LaurentPoly.symbol("t1"), LaurentPoly.symbol("t2")
q1, q2 = LaurentPoly.symbol("q1"), LaurentPoly.symbol("q2")
x = LaurentPoly.symbol("x")


def test_rational_gammas():
    table = gamma_coefficients("rational", 6)
    assert table.get(3, 0) == -2 * t1 - 2 * t2
    assert table.get(3, 1) == 0
    assert table.get(4, 0) == 0
    assert table.get(4, 1) == -6 * t1 - 6 * t2
    assert set(table.entries) == {(a, b) for a in range(3, 7) for b in range(0, a - 1)}


def test_rational_gammas_are_swap_symmetric():
    for value in gamma_coefficients("rational", 6).entries.values():
        assert value.swap("t1", "t2") == value


def test_trig_gammas():
    table = gamma_coefficients("trig", 5)
    assert table.get("+", 1) == (q1 * q2) ** -1 - 1
    assert len(table.entries) == 10
    for value in table.entries.values():
        assert value.swap("q1", "q2") == value


def test_gamma_table_rows():
    rows = gamma_coefficients("rational", 4).rows()
    assert rows[0] == {"level": "rational", "a": "3", "b": "0", "gamma": str(-2 * t1 - 2 * t2)}


def test_gamma_tables_need_enough_order():
    with pytest.raises(InvalidCombination):
        gamma_coefficients("rational", 2)
    with pytest.raises(InvalidCombination):
        gamma_coefficients("elliptic", 4)


@pytest.mark.parametrize("kind", ["coh", "kth"])
def test_sheaf_gammas_equal_plain_gammas(kind):
    level = {"coh": "rational", "kth": "trig"}[kind]
    table = sheaf_gamma_expansion(kind, 5)
    assert table.entries == gamma_coefficients(level, 5).entries


@pytest.mark.parametrize("level", LEVELS)
def test_colored_tildes_are_exchanged_by_color_swap(level):
    assert zeta_colored_symmetric(level)


def test_invalid_kernel_combinations():
    with pytest.raises(InvalidCombination):
        zeta_kernel("rational", "tildePlus")
    with pytest.raises(InvalidCombination):
        zeta_kernel("trig", "tilde", colored=True)
    with pytest.raises(InvalidCombination):
        zeta_kernel("quantum")


def test_rational_kernel_value():
    kernel = zeta_kernel("rational").body
    assert kernel == RationalFunction((x + t1) * (x + t2), x * (x + t1 + t2))


def test_ratio_variants_are_inverse():
    forward = zeta_kernel("trig", "ratioForward").body
    backward = zeta_kernel("trig", "ratioBackward").body
    assert (forward * backward).reduced() == RationalFunction.of(1)


@pytest.mark.parametrize("variant", ["plain", "tilde"])
def test_elliptic_kernels_at_p_zero(variant):
    limit = degenerate(zeta_kernel("elliptic", variant), "pZero")
    assert limit.level == "trig"
    assert limit.body == zeta_kernel("trig", variant).body


@pytest.mark.parametrize("variant, sign", [("plain", 1), ("tilde", -1)])
def test_rational_limit_of_trig_kernels(variant, sign):
    limit = degenerate(zeta_kernel("trig", variant), "rationalLimit")
    assert limit.body == zeta_kernel("rational", variant).body * sign


def test_degenerate_rejects_wrong_level():
    with pytest.raises(InvalidCombination):
        degenerate(zeta_kernel("trig"), "pZero")
    with pytest.raises(InvalidCombination):
        degenerate(zeta_kernel("elliptic"), "rationalLimit")


def test_p_zero_of_theta_ratio():
    ratio = ThetaRatio.theta(x * q1) / ThetaRatio.theta(x)
    assert p_zero(ratio) == RationalFunction(1 - x * q1, 1 - x)


def test_sheaf_residue_divisible_by_diagonal_constant():
    # theta(xL1) theta(xL2) - theta(x) theta(xq) at p = 0 is divisible by (1 - L1)(1 - L2)
    l1, l2 = LaurentPoly.symbol("L1"), LaurentPoly.symbol("L2")
    difference = (1 - x * l1) * (1 - x * l2) - (1 - x) * (1 - x * l1 * l2)
    assert is_divisible(difference, (1 - l1) * (1 - l2))
