from fractions import Fraction

import pytest

from engine.errors import GenericityViolation, InvalidCombination, UnsupportedPoleGeometry
from engine.kclass import KClass
from engine.ring import LaurentPoly
from engine.theta import AutomorphyFactor, ThetaRatio
from engine.universal import (
    Operator,
    ParamSpec,
    RepState,
    apply_e,
    apply_f,
    apply_h,
    compose_colored,
    degenerate_to_k_theory,
    f_det_form,
    h_automorphy,
    relation_sides,
    seed_class,
    symmetric_form,
    verify_elliptic_relation,
)

RELATIONS = ["rel1", "rel2", "rel3", "rel4", "rel5", "hh"]
SEEDS = ["one", "theta"]


def test_sampling_is_deterministic_and_generic():
    a, b = ParamSpec.sample(3, 2), ParamSpec.sample(3, 2)
    assert a == b
    assert a.rank == 2
    assert a.resonance() is None
    assert 0 < a.p < 1 < a.q < 1 / a.p


def test_sampling_rejects_bad_rank():
    with pytest.raises(InvalidCombination):
        ParamSpec.sample(1, 5)


def test_resonance_detection():
    spec = ParamSpec(
        p=Fraction(1, 9), q1=Fraction(11, 10), q2=Fraction(107, 100), us=(Fraction(1, 3),), x1=Fraction(1, 3)
    )
    # u1 / x1 = 1 = p^0
    assert spec.resonance() is not None
    out_of_range = ParamSpec(p=Fraction(1, 2), q1=Fraction(3), q2=Fraction(3), us=(Fraction(4, 5),), x1=Fraction(4, 5))
    assert "need" in out_of_range.resonance()


def test_sampling_gives_up_after_attempts(monkeypatch):
    monkeypatch.setattr(ParamSpec, "resonance", lambda self: "always")
    with pytest.raises(GenericityViolation):
        ParamSpec.sample(1, 1, attempts=3)


def test_operator_validation():
    with pytest.raises(InvalidCombination):
        Operator("g", "z")
    with pytest.raises(InvalidCombination):
        Operator("e", "x")
    with pytest.raises(InvalidCombination):
        apply_h("0", RepState(), "z")
    with pytest.raises(InvalidCombination):
        compose_colored("e", "f", order="green-blue")
    with pytest.raises(InvalidCombination):
        seed_class("two", KClass.tautological(1))


def test_state_description():
    state = apply_h("+", apply_e(RepState(), "w"), "z")
    assert str(state) == "h+(z) e(w) . 1"
    assert state.expansions == ("w",)
    assert state.shifts == [("w", 1)]


def test_h_automorphy_is_q_to_the_rank():
    q = LaurentPoly.symbol("q1") * LaurentPoly.symbol("q2")
    for rank in (1, 2, 3):
        assert h_automorphy(rank) == AutomorphyFactor(0, q ** rank)


@pytest.mark.parametrize("seed", ["one", "theta"])
def test_rel1_integrand_is_the_symmetric_form(seed):
    lhs, _ = relation_sides("rel1", seed, 2)
    assert lhs.integrand() == symmetric_form(seed, 2)


def test_rel1_sides_are_swapped_integrands():
    lhs, rhs = relation_sides("rel1", "one", 1)
    swap = {"z": LaurentPoly.symbol("w"), "w": LaurentPoly.symbol("z")}
    assert lhs.integrand().substitute(swap) == rhs.integrand()


def test_theta_seed_is_nontrivial():
    assert seed_class("theta", KClass.tautological(1)) != ThetaRatio(1)


@pytest.mark.slow
@pytest.mark.parametrize("seed", SEEDS)
@pytest.mark.parametrize("relation", RELATIONS)
def test_elliptic_relations_hold(params, relation, seed):
    outcome = verify_elliptic_relation(relation, params, order=1, window=3, seed=seed)
    assert outcome.status == "PASS", outcome.notes


def test_unavailable_expansion_is_a_failure(params, monkeypatch):
    def unsupported(*args, **kwargs):
        raise UnsupportedPoleGeometry("no expansion")

    monkeypatch.setattr("engine.universal.expand_difference", unsupported)
    outcome = verify_elliptic_relation("rel3", params, order=1, window=3)
    assert outcome.status == "FAIL"
    assert any("no expansion" in note for note in outcome.notes)


@pytest.mark.slow
def test_perturbed_elliptic_relation_fails(params):
    outcome = verify_elliptic_relation("rel1", params, order=1, window=3, perturbed=True)
    assert outcome.status == "FAIL"


# at p = 0 the residue argument of rel5 is carried out on Psi = 1
K_THEORY_CASES = [(r, s) for r in RELATIONS for s in SEEDS if (r, s) != ("rel5", "theta")]


@pytest.mark.slow
@pytest.mark.parametrize("relation, seed", K_THEORY_CASES)
def test_k_theory_degeneration(params, relation, seed):
    outcome = degenerate_to_k_theory(relation, params, window=6, seed=seed)
    assert outcome.status == "PASS", outcome.notes
    if relation == "rel5":
        assert outcome.unit in ("1", "-1")


@pytest.mark.parametrize("rank", [1, 2, 3])
def test_f_on_the_unit_state_matches_the_determinant_form(rank):
    plain, det_form = f_det_form(rank)
    assert plain == det_form
    assert apply_f(RepState("one", rank), "z").integrand() == plain
