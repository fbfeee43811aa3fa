import pytest

from engine.errors import InvalidCombination
from engine.presentations import (
    IDENTITY,
    GeneratorSymbol,
    WordCombination,
    elliptic_reduces_to_trig,
    explicit_relations,
    index_letter,
    relation_series,
    series_letter,
)
from engine.ring import LaurentPoly, is_divisible

t1, t2 = LaurentPoly.symbol("t1"), LaurentPoly.symbol("t2")
q1, q2 = LaurentPoly.symbol("q1"), LaurentPoly.symbol("q2")


def e(i):
    return GeneratorSymbol("e", i)


def f(i):
    return GeneratorSymbol("f", i)


def h(i):
    return GeneratorSymbol("h", i)


def _at(identities, label):
    return next(i for i in identities if i.label == label)


def test_series_letters():
    assert series_letter("rational", "e", -3) == e(2)
    assert series_letter("rational", "h", 0) is IDENTITY
    assert series_letter("rational", "f", 1) is None
    assert series_letter("trig", "hPlus", 2) is None
    assert series_letter("trig", "hMinus", 2) == GeneratorSymbol("hMinus", 2)
    with pytest.raises(InvalidCombination):
        series_letter("trig", "h", 0)


def test_rational_h_conventions():
    assert index_letter("rational", "h", -1) is IDENTITY
    assert index_letter("rational", "h", -2) is None


def test_rational_rel5_identity():
    identity = _at(explicit_relations("rational", "rel5", window=2), (1, 1))
    t = t1 + t2
    expected = (
        WordCombination.word((f(1), e(1)), t)
        - WordCombination.word((e(1), f(1)), t)
        + WordCombination.word((h(2),), t1 * t2)
    )
    assert identity.combination == expected
    assert identity.leading == (f(1), e(1))


def test_rational_rel3_lowest_identities():
    identities = explicit_relations("rational", "rel3", window=3)
    # [h_0, e_m] and [h_1, e_m] have no tail
    assert _at(identities, (0, 2)).remainder().is_zero()
    assert _at(identities, (1, 2)).remainder().is_zero()
    # [h_2, e_m] picks up gamma_30 e_m h_-1 = gamma_30 e_m
    tail = _at(identities, (2, 0)).remainder()
    assert tail.words() == [(e(0),)]


@pytest.mark.parametrize("level", ["rational", "trig"])
@pytest.mark.parametrize("relation", ["rel3", "rel4", "rel5"])
def test_commutator_tails_are_divisible(level, relation):
    divisor = t1 * t2 if level == "rational" else (1 - q1) * (1 - q2)
    for identity in explicit_relations(level, relation, window=3):
        for _, coeff in identity.remainder().items():
            assert is_divisible(LaurentPoly.lift(coeff), divisor), str(identity)


@pytest.mark.parametrize("level, swap", [("rational", ("t1", "t2")), ("trig", ("q1", "q2"))])
def test_identities_are_swap_invariant(level, swap):
    for relation in ("rel1", "rel2", "rel3", "rel4", "rel5"):
        for identity in explicit_relations(level, relation, window=3):
            assert identity.combination.swap(*swap) == identity.combination


def test_trig_rel3_has_both_signs():
    labels = {i.label[0] for i in explicit_relations("trig", "rel3", window=2)}
    assert labels == {"+", "-"}


def test_hh_identities_vanish_at_rational_level():
    # [h(z), h(w)] = 0 gives h_n h_m - h_m h_n
    identity = _at(explicit_relations("rational", "hh", window=2), (1, 2))
    expected = WordCombination.word((h(1), h(2))) - WordCombination.word((h(2), h(1)))
    assert identity.combination == expected


def test_elliptic_rel1_reduces_to_trig():
    assert elliptic_reduces_to_trig("rel1", window=3) == (True, None)


def test_elliptic_rel3_has_no_finite_explicit_form():
    with pytest.raises(InvalidCombination):
        relation_series("elliptic", "rel3")
