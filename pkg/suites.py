import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

import mpmath

from config import Settings
from corpus import RelationCorpus
from engine.contour import annulus_residues, pseries_to_bilaurent
from engine.errors import ConfigError, EngineError, GenericityViolation
from engine.kclass import KClass
from engine.kernels import (
    degenerate,
    gamma_coefficients,
    sheaf_gamma_expansion,
    zeta_colored_symmetric,
    zeta_kernel,
)
from engine.presentations import (
    RELATION_IDS,
    elliptic_reduces_to_trig,
    explicit_relations,
    match_paper_explicit,
)
from engine.pushforward import (
    contour_push,
    embed_push_automorphy,
    exact_value,
    lemma_integral_check,
    proj_bundle_push,
    proj_bundle_terms,
    quadrature_push,
)
from engine.ring import LaurentPoly, Monomial, is_divisible
from engine.series import PSeries
from engine.theta import NOME, ThetaRatio, theta_truncated
from engine.universal import ParamSpec, degenerate_to_k_theory, verify_elliptic_relation
from models import CheckReport, Mismatch, ReportDocument, SuiteConfig

TOOL_VERSION = "1.0.0"

PUSHFORWARD_SPECS = 20
SEED_STATES = ("one", "theta")

Z = Monomial.symbol("z")


@dataclass(frozen=True)
class Check:
    """One unit of work; runs in a worker process, so everything here must pickle"""

    suite: str
    relation: str
    level: str
    kind: str
    np: int
    window: int
    rank: Optional[int] = None
    seed: Optional[int] = None
    params: Optional[ParamSpec] = None
    extra: Tuple[Tuple[str, Any], ...] = ()

    @property
    def name(self) -> str:
        seed = f" seed={self.seed}" if self.seed is not None else ""
        return f"{self.suite}/{self.relation}{seed}"


@dataclass
class Result:
    status: str = "PASS"
    mismatch: Optional[Mismatch] = None
    detail: List[str] = field(default_factory=list)

    def fail(self, key, lhs, rhs, note: Optional[str] = None) -> "Result":
        if self.status == "PASS":
            z, w, p = key
            self.mismatch = Mismatch(z_exp=z, w_exp=w, p_ord=p, lhs=str(lhs), rhs=str(rhs))
        self.status = "FAIL"
        if note:
            self.detail.append(note)
        return self


# =============================================================================
# Theta functions
# =============================================================================


def _series_check(lhs: PSeries, rhs: PSeries, window: int, note: str) -> Result:
    mismatch = pseries_to_bilaurent(lhs, window).crop(window).first_mismatch(
        pseries_to_bilaurent(rhs, window).crop(window)
    )
    result = Result()
    if mismatch is not None:
        result.fail(*mismatch, note)
    return result


def check_theta(check: Check) -> Result:
    order, window = check.np, check.window
    theta_z = theta_truncated(Z, order)
    if check.relation == "quasi-periodicity":
        # theta(zp) = -theta(z)/z
        lhs = theta_truncated(Z * Monomial.symbol(NOME), order)
        rhs = -theta_z.map(lambda v: v * LaurentPoly.monomial(Z.inverse()))
        return _series_check(lhs, rhs, window, "theta(zp) != -theta(z)/z")
    if check.relation == "inversion":
        # theta(1/z) = -theta(z)/z
        lhs = theta_truncated(Z.inverse(), order)
        rhs = -theta_z.map(lambda v: v * LaurentPoly.monomial(Z.inverse()))
        return _series_check(lhs, rhs, window, "theta(1/z) != -theta(z)/z")
    if check.relation == "p-zero":
        one_minus_z = PSeries.constant(1 - LaurentPoly.symbol("z"), 0)
        return _series_check(theta_z.truncate(0), one_minus_z, window, "theta(z) at p = 0 is not 1 - z")
    # residue of 1/theta(z) at z = 1
    result = Result()
    values = {NOME: Fraction(1, 10)}
    residues = annulus_residues(ThetaRatio.theta(Z) ** -1, "z", values)
    at_one = [r for r in residues if r.location == 1]
    if len(residues) != 1 or not at_one:
        return result.fail((0, 0, 0), [str(r.location) for r in residues], "1", "expected a single pole at z = 1")
    series = at_one[0].series(values, order)
    expected = PSeries.constant(Fraction(-1), order)
    for k in range(order + 1):
        if series.coefficient(k) != expected.coefficient(k):
            return result.fail((0, 0, k), series.coefficient(k), expected.coefficient(k), "Res 1/theta != -1")
    result.detail.append(f"Res_(z=1) 1/theta(z) = {at_one[0].value} to p^{order}")
    return result


# =============================================================================
# Kernels
# =============================================================================


def check_kernels(check: Check) -> Result:
    result = Result()
    max_order = max(check.window, 4)
    if check.relation == "gamma-rational":
        table = gamma_coefficients("rational", max_order)
        t1, t2 = LaurentPoly.symbol("t1"), LaurentPoly.symbol("t2")
        for key, expected in (((3, 0), -2 * t1 - 2 * t2), ((4, 0), LaurentPoly.zero())):
            if table.get(*key) != expected:
                result.fail((-key[0], key[1], 0), table.get(*key), expected, f"gamma_{key[0]}{key[1]}")
        result.detail.append(f"{len(table.entries)} coefficients divisible by t1*t2")
    elif check.relation == "gamma-trig":
        table = gamma_coefficients("trig", max_order)
        result.detail.append(f"{len(table.entries)} coefficients divisible by (1 - q1)(1 - q2)")
    elif check.relation in ("sheaf-coh", "sheaf-kth"):
        table = sheaf_gamma_expansion(check.relation.split("-")[1], max_order)
        result.detail.append(f"{len(table.entries)} diagonal coefficients equal the plain gammas")
    elif check.relation == "colored-symmetry":
        for level in ("rational", "trig", "elliptic"):
            if not zeta_colored_symmetric(level):
                result.fail((0, 0, 0), level, "symmetric", f"{level} tilde kernels are not exchanged by the color swap")
    return result


# =============================================================================
# Presentations
# =============================================================================


def check_algebra(check: Check) -> Result:
    result = Result()
    level, window = check.level, check.window
    opts = dict(check.extra)
    if check.relation == "swap-invariance":
        swap = ("t1", "t2") if level == "rational" else ("q1", "q2")
        for relation in ("rel1", "rel2", "rel3", "rel4", "rel5"):
            for identity in explicit_relations(level, relation, window=min(window, 4)):
                if identity.combination.swap(*swap) != identity.combination:
                    n, m = identity.label[-2:]
                    return result.fail((n, m, 0), identity.combination.swap(*swap), identity.combination, str(identity))
        result.detail.append(f"identities invariant under {swap[0]} <-> {swap[1]}")
        return result
    if check.relation == "divisibility":
        divisor = LaurentPoly.symbol("t1") * LaurentPoly.symbol("t2")
        if level == "trig":
            divisor = (1 - LaurentPoly.symbol("q1")) * (1 - LaurentPoly.symbol("q2"))
        for relation in ("rel3", "rel4", "rel5"):
            for identity in explicit_relations(level, relation, window=window):
                for word, coeff in identity.remainder().items():
                    if not is_divisible(LaurentPoly.lift(coeff), divisor):
                        n, m = identity.label[-2:]
                        return result.fail((n, m, 0), coeff, f"multiple of {divisor}", str(identity))
        result.detail.append(f"commutators of rel3-rel5 are multiples of {divisor}")
        return result
    if check.relation == "p-zero":
        for relation in ("rel1", "rel2"):
            ok, where = elliptic_reduces_to_trig(relation, window=min(window, 4))
            if not ok:
                return result.fail((where[0], where[1], 0), "elliptic", "trig", f"{relation} at p^0")
        result.detail.append("elliptic rel1/rel2 identities reduce to the trigonometric ones at p^0")
        return result

    corpus = RelationCorpus(opts["relations_dir"])
    match = match_paper_explicit(
        level, check.relation, corpus.stated(level, check.relation), window=window,
        perturbed=opts.get("perturbed", False),
    )
    result.detail.append(f"{match.checked} identities compared")
    if match.status == "PASS":
        result.detail.append(f"unit {match.unit}")
        return result
    mismatch = match.first_mismatch or {}
    n, m = ([int(x) for x in re.findall(r"-?\d+", mismatch.get("label", ""))] + [0, 0])[:2]
    return result.fail(
        (n, m, 0), mismatch.get("engine", ""), mismatch.get("stated", ""), f"first differing word {mismatch.get('word', '')}"
    )


# =============================================================================
# Universal representation
# =============================================================================


def _from_outcome(outcomes) -> Result:
    result = Result()
    for outcome in outcomes:
        result.detail.extend(f"{outcome.seed_state}: {note}" for note in outcome.notes)
        if outcome.unit is not None:
            result.detail.append(f"{outcome.seed_state}: unit {outcome.unit}")
        if outcome.status != "PASS":
            key, lhs, rhs = outcome.first_mismatch
            result.fail(key, lhs, rhs, f"seed state {outcome.seed_state} fails")
    return result


def check_elliptic(check: Check) -> Result:
    return _from_outcome(
        verify_elliptic_relation(check.relation, check.params, check.np, check.window, seed)
        for seed in SEED_STATES
    )


def check_ktheory(check: Check) -> Result:
    # at p = 0 the residue argument of rel5 is carried out on Psi = 1
    states = ("one",) if check.relation == "rel5" else SEED_STATES
    return _from_outcome(
        degenerate_to_k_theory(check.relation, check.params, check.window, seed) for seed in states
    )


# =============================================================================
# Pushforwards
# =============================================================================


def _section(params: ParamSpec) -> ThetaRatio:
    """A holomorphic section of z: theta(z x1) theta(z q1)^(seed mod 2) z^(seed mod 3 - 1)"""
    seed = params.seed or 0
    sigma = ThetaRatio.theta(Z * Monomial.symbol("x1"))
    if seed % 2:
        sigma = sigma * ThetaRatio.theta(Z * Monomial.symbol("q1"))
    return sigma * LaurentPoly.monomial(Z ** (seed % 3 - 1))


def check_pushforward(check: Check) -> Result:
    result = Result()
    params = check.params
    opts = dict(check.extra)
    values = params.values()
    roots = [Monomial.symbol(f"u{i}") for i in range(1, params.rank + 1)]
    bundle = KClass.of(*roots)
    sigma = _section(params)

    by_roots = proj_bundle_push(sigma, roots, values, check.np)
    by_contour = contour_push(sigma, bundle, values, check.np)
    for k in range(check.np + 1):
        if by_roots.coefficient(k) != by_contour.coefficient(k):
            return result.fail((0, 0, k), by_roots.coefficient(k), by_contour.coefficient(k), "residue sum != contour form")
    result.detail.append(f"residue sum = contour form to p^{check.np}")
    result.detail.append(f"embedding automorphy {embed_push_automorphy(sigma, KClass.of(roots[0]), 'z')}")

    if params.rank <= 3:
        point = {s: mpmath.mpf(v.numerator) / v.denominator for s, v in values.items()}
        numeric = quadrature_push(sigma, bundle, point, opts.get("points", 4096))
        closed = exact_value(proj_bundle_terms(sigma, roots), point)
        delta = abs(numeric - closed)
        if delta >= opts.get("tolerance", 1e-9):
            return result.fail((0, 0, 0), mpmath.nstr(numeric, 15), mpmath.nstr(closed, 15), f"quadrature off by {mpmath.nstr(delta, 3)}")
        result.detail.append(f"quadrature agrees to {mpmath.nstr(delta, 3)}")
    return result


def check_lemma(check: Check) -> Result:
    report = lemma_integral_check(check.params.values(), check.np)
    result = Result(detail=list(report.notes))
    result.detail.append(f"poles {[str(x) for x in report.poles]}")
    if report.residue is not None:
        result.detail.append(f"residue at 1: {report.residue}")
    if report.status != "PASS":
        result.status = "FAIL"
        result.mismatch = Mismatch(z_exp=0, w_exp=0, p_ord=0, lhs=str(report.residue), rhs="-theta(L1)theta(L2)/theta(q)")
    return result


# =============================================================================
# Degeneration tower
# =============================================================================


def check_tower(check: Check) -> Result:
    result = Result()
    if check.relation == "elliptic-to-trig":
        for variant in ("plain", "tilde"):
            limit = degenerate(zeta_kernel("elliptic", variant), "pZero").body
            target = zeta_kernel("trig", variant).body
            if not limit == target:
                result.fail((0, 0, 0), limit, target, f"zeta elliptic {variant} at p = 0")
        result.detail.append("zeta elliptic at p = 0 is zeta trig")
        return result
    for variant, sign in (("plain", 1), ("tilde", -1)):
        limit = degenerate(zeta_kernel("trig", variant), "rationalLimit").body
        target = zeta_kernel("rational", variant).body
        if not limit == target * sign:
            result.fail((0, 0, 0), limit, target * sign, f"rational limit of zeta trig {variant}")
    result.detail.append("leading eps-order of zeta trig is zeta rational; the tilde kernel picks up a sign")
    return result


RUNNERS: Dict[str, Callable[[Check], Result]] = {
    "theta": check_theta,
    "kernels": check_kernels,
    "algebra": check_algebra,
    "elliptic-rep": check_elliptic,
    "ktheory-degeneration": check_ktheory,
    "pushforward": check_pushforward,
    "lemma-integral": check_lemma,
    "degeneration-tower": check_tower,
}


def run_check(check: Check) -> CheckReport:
    start = time.perf_counter()
    try:
        result = RUNNERS[check.kind](check)
    except EngineError as e:
        result = Result().fail((0, 0, 0), type(e).__name__, "", str(e))
    return CheckReport(
        suite=check.suite,
        relation=check.relation,
        level=check.level,
        status=result.status,
        first_mismatch=result.mismatch,
        seed=check.seed,
        np=check.np,
        window=check.window,
        rank=check.rank,
        millis=int((time.perf_counter() - start) * 1000),
        detail=result.detail,
    )


# =============================================================================
# Runner
# =============================================================================


class SuiteRunner:
    def __init__(self, settings: Settings):
        self.settings = settings

    def param_specs(self, config: SuiteConfig, seeds: List[int]) -> List[ParamSpec]:
        if config.params:
            return [self.explicit_params(config.params)]
        return [ParamSpec.sample(seed, config.rank) for seed in seeds]

    @staticmethod
    def explicit_params(raw: Dict[str, str]) -> ParamSpec:
        values = {k: Fraction(v) for k, v in raw.items()}
        us = []
        while f"u{len(us) + 1}" in values:
            us.append(values[f"u{len(us) + 1}"])
        spec = ParamSpec(
            p=values["p"], q1=values["q1"], q2=values["q2"], us=tuple(us),
            x1=values.get("x1", Fraction(9, 10)),
        )
        problem = spec.resonance()
        if problem:
            raise ConfigError(f"parameters are not generic: {problem}")
        return spec

    def checks(self, config: SuiteConfig) -> List[Check]:
        suite, np, window, rank = config.suite, config.np, config.window, config.rank
        if suite == "theta":
            return [Check(suite, name, "theta", "theta", np, window)
                    for name in ("quasi-periodicity", "inversion", "p-zero", "residue")]
        if suite == "kernels":
            return [Check(suite, name, "kernels", "kernels", np, window)
                    for name in ("gamma-rational", "gamma-trig", "sheaf-coh", "sheaf-kth", "colored-symmetry")]
        if suite in ("algebra-rational", "algebra-trig"):
            level = suite.split("-")[1]
            extra = (("relations_dir", self.settings.relations_dir),)
            names = ["rel1", "rel2", "rel3", "rel4", "rel5", "swap-invariance", "divisibility"]
            if level == "trig":
                names.append("p-zero")
            return [Check(suite, name, level, "algebra", np, window, extra=extra) for name in names]
        if suite in ("elliptic-rep", "ktheory-degeneration"):
            level = "elliptic" if suite == "elliptic-rep" else "ktheory"
            return [
                Check(suite, relation, level, suite, np, window, rank, spec.seed, spec)
                for spec in self.param_specs(config, config.seeds)
                for relation in RELATION_IDS
            ]
        if suite == "pushforward":
            first = config.seeds[0] if config.seeds else 1
            seeds = list(range(first, first + PUSHFORWARD_SPECS))
            extra = (("points", self.settings.quadrature_points), ("tolerance", self.settings.quadrature_tolerance))
            return [
                Check(suite, "projective-bundle", "elliptic", suite, np, window, rank, spec.seed, spec, extra)
                for spec in self.param_specs(config, seeds)
            ]
        if suite == "lemma-integral":
            return [
                Check(suite, "zeta-residues", "elliptic", suite, np, window, rank, spec.seed, spec)
                for spec in self.param_specs(config, config.seeds)
            ]
        if suite == "degeneration-tower":
            return [Check(suite, name, "tower", suite, np, window)
                    for name in ("elliptic-to-trig", "trig-to-rational")]
        raise ConfigError(f"unknown suite {suite}")

    def run(self, config: SuiteConfig, quiet: bool = False) -> ReportDocument:
        start = time.perf_counter()
        try:
            checks = self.checks(config)
        except GenericityViolation as e:
            raise ConfigError(str(e)) from e
        if config.suite.startswith("algebra"):
            RelationCorpus(self.settings.relations_dir).load()

        if not quiet:
            print("=" * 60)
            print(f"🧮 SUITE {config.suite}: {len(checks)} checks (np={config.np}, window={config.window})")
            print("=" * 60)

        reports: List[CheckReport] = []
        workers = max(1, config.workers)
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = pool.map(run_check, checks)
                for i, report in enumerate(results, 1):
                    reports.append(report)
                    self._progress(i, len(checks), checks[i - 1], report, quiet)
        else:
            for i, check in enumerate(checks, 1):
                if not quiet:
                    print(f"  [{i}/{len(checks)}] {check.name}...", end=" ", flush=True)
                report = run_check(check)
                reports.append(report)
                self._progress(i, len(checks), check, report, quiet, inline=True)

        passed = sum(1 for r in reports if r.passed)
        if not quiet:
            print(f"  → Passed: {passed}, Failed: {len(reports) - passed}")

        return ReportDocument(
            tool_version=TOOL_VERSION,
            config=config.model_dump(),
            reports=reports,
            wall_millis=int((time.perf_counter() - start) * 1000),
            timing={f"{r.suite}/{r.relation}/{r.seed}": r.millis for r in reports},
        )

    @staticmethod
    def _progress(i: int, n: int, check: Check, report: CheckReport, quiet: bool, inline: bool = False):
        if quiet:
            return
        if not inline:
            print(f"  [{i}/{n}] {check.name}...", end=" ", flush=True)
        if report.passed:
            print("✅")
        else:
            reason = report.detail[-1] if report.detail else "mismatch"
            print(f"❌ {reason}")
