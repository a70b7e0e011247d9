"""
Property audit use case.

Runs the soundness and tightness properties of the relaxation on seeded
random instances and reports every violation with enough detail to rebuild
the instance: the fixture seed, the center, the radius and the class pair.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.core.domain_services.bounds import count_unstable
from src.core.domain_services.model import log_rpr
from src.core.domain_services.oracle import (
    FixtureKind,
    decision_counterexamples,
    make_fixture,
    region_samples,
    relaxation_violation,
    sample_extrema,
    uniform_constant_network,
)
from src.core.domain_services.relax import build_joint_lp
from src.core.domain_services.verification import ImplicationVerifier, VerifierOptions
from src.core.entities.network import ClassPair
from src.core.entities.verification import summarize
from src.core.exceptions import ConfigurationError
from src.core.interfaces.lp_solver import LpSolverInterface, SolverError
from src.core.use_cases.worker_pool import map_in_pool

logger = logging.getLogger(__name__)

SOUNDNESS_TOL = 1e-6
UNIFORM_TOL = 1e-9
CONTAINMENT_TOL = 1e-7


@dataclass(frozen=True)
class AuditOptions:
    """
    Audit knobs.

    Attributes:
        trials: Number of seeded instances
        seed: Base seed; trial t uses fixture seed ``seed + t``
        deltas: Radii checked on every instance
        samples_per_instance: Oracle sample count per region
        containment_points: Sampled points checked against the relaxation
        inject_fault: Corrupt the triangle rows (negative control)
    """

    trials: int = 100
    seed: int = 0
    deltas: Tuple[float, ...] = (0.01, 0.05, 0.2)
    samples_per_instance: int = 10000
    containment_points: int = 256
    inject_fault: bool = False

    def __post_init__(self):
        problems = []
        if self.trials < 1:
            problems.append(f"trials must be >= 1, got {self.trials}")
        if self.samples_per_instance < 1:
            problems.append(f"samples_per_instance must be >= 1, got {self.samples_per_instance}")
        if not self.deltas or any(d <= 0 for d in self.deltas):
            problems.append("audit deltas must be a non-empty list of positive radii")
        if problems:
            raise ConfigurationError("; ".join(problems))


@dataclass
class AuditViolation:
    check: str
    trial: int
    fixture_seed: int
    delta: float
    pair: Optional[Tuple[int, int]]
    center: List[float]
    detail: Dict[str, Any]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check": self.check,
            "trial": self.trial,
            "fixture_seed": self.fixture_seed,
            "delta": self.delta,
            "pair": list(self.pair) if self.pair is not None else None,
            "center": self.center,
            "detail": self.detail,
        }


@dataclass
class TrialOutcome:
    trial: int
    fixture_seed: int
    checks: Counter = field(default_factory=Counter)
    violations: List[AuditViolation] = field(default_factory=list)
    unavailable: int = 0
    unstable_instances: int = 0
    improved_instances: int = 0
    improvements: List[float] = field(default_factory=list)
    positive_chains: List[Dict[str, Any]] = field(default_factory=list)
    disagreements: int = 0
    counterexamples: int = 0


@dataclass
class AuditReport:
    """Aggregated audit outcome; contains no timing so reruns are identical."""

    options: AuditOptions
    outcomes: List[TrialOutcome]

    @property
    def violations(self) -> List[AuditViolation]:
        return [v for outcome in self.outcomes for v in outcome.violations]

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, Any]:
        checks: Counter = Counter()
        for outcome in self.outcomes:
            checks.update(outcome.checks)
        improvements = [value for outcome in self.outcomes for value in outcome.improvements]
        mean, std = summarize(improvements)
        unstable = sum(o.unstable_instances for o in self.outcomes)
        improved = sum(o.improved_instances for o in self.outcomes)
        return {
            "seed": self.options.seed,
            "trials": self.options.trials,
            "deltas": list(self.options.deltas),
            "samples_per_instance": self.options.samples_per_instance,
            "inject_fault": self.options.inject_fault,
            "passed": self.passed,
            "checks": dict(sorted(checks.items())),
            "violation_count": len(self.violations),
            "violations": [v.to_dict() for v in self.violations],
            "unavailable_bounds": sum(o.unavailable for o in self.outcomes),
            "tightness": {
                "instances_with_unstable": unstable,
                "improved": improved,
                "improved_fraction": improved / unstable if unstable else None,
                "improvement_pct_mean": mean if improvements else None,
                "improvement_pct_std": std if improvements else None,
            },
            "transitivity": {
                "positive_adjacent_cases": [c for o in self.outcomes for c in o.positive_chains],
                "disagreements": sum(o.disagreements for o in self.outcomes),
                "counterexamples": sum(o.counterexamples for o in self.outcomes),
            },
        }


class RunAuditUseCase:
    """Use case for the randomized property audit."""

    def __init__(self, solver: LpSolverInterface, options: Optional[VerifierOptions] = None, jobs: int = 1):
        self._solver = solver
        self._base_options = options or VerifierOptions()
        self._jobs = jobs

    async def execute(self, audit: AuditOptions) -> AuditReport:
        """
        Run every trial and aggregate the outcomes in trial order.

        Returns:
            AuditReport; ``passed`` is False on any asserted-property violation
        """
        relax = replace(self._base_options.relax, corrupt_triangle=audit.inject_fault)
        verifier = ImplicationVerifier(self._solver, replace(self._base_options, relax=relax))
        if audit.inject_fault:
            logger.warning("Fault injection enabled: triangle upper rows lose their intercept")

        outcomes = await map_in_pool(
            lambda trial: _run_trial(verifier, audit, trial), list(range(audit.trials)), self._jobs
        )
        report = AuditReport(options=audit, outcomes=outcomes)
        logger.info(
            f"Audit of {audit.trials} trials (seed {audit.seed}): "
            f"{len(report.violations)} violation(s)"
        )
        return report


def _run_trial(verifier: ImplicationVerifier, audit: AuditOptions, trial: int) -> TrialOutcome:
    fixture_seed = audit.seed + trial
    fixture = make_fixture(FixtureKind.RANDOM_SMALL, seed=fixture_seed, count=3)
    outcome = TrialOutcome(trial=trial, fixture_seed=fixture_seed)
    center = [float(v) for v in fixture.center]

    def violate(check: str, delta: float, pair: Optional[ClassPair], **detail) -> None:
        violation = AuditViolation(
            check, trial, fixture_seed, delta, (pair.i, pair.j) if pair else None, center, detail
        )
        logger.warning(f"Audit violation '{check}' in trial {trial} (fixture seed {fixture_seed}, delta={delta})")
        outcome.violations.append(violation)

    current_delta = 0.0
    try:
        _check_exactness(verifier, fixture, outcome, violate)
        for position, delta in enumerate(audit.deltas):
            current_delta = delta
            _check_region(verifier, fixture, audit, delta, position == 0, outcome, violate)
    except SolverError as e:
        violate("solver", current_delta, None, message=str(e))
    return outcome


def _check_exactness(verifier: ImplicationVerifier, fixture, outcome: TrialOutcome, violate) -> None:
    net1, net2 = fixture.networks[0], fixture.networks[1]
    region = fixture.region.with_delta(0.0)
    for pair in _pairs(fixture):
        outcome.checks["exactness"] += 1
        bound = verifier.bound_pair(net1, net2, region, pair)
        truth = log_rpr(net1, net2, fixture.center, pair)
        if bound.lower is None or bound.upper is None:
            outcome.unavailable += 1
            continue
        if abs(bound.lower - truth) > SOUNDNESS_TOL or abs(bound.upper - truth) > SOUNDNESS_TOL:
            violate("exactness", 0.0, pair, lower=bound.lower, upper=bound.upper, log_rpr=truth)


def _check_region(
    verifier: ImplicationVerifier, fixture, audit: AuditOptions, delta: float, first: bool,
    outcome: TrialOutcome, violate,
) -> None:
    net1, net2, net3 = fixture.networks
    region = fixture.region.with_delta(delta)
    bounds1 = verifier.compute_bounds(net1, region)
    bounds2 = verifier.compute_bounds(net2, region)
    points = region_samples(region, audit.samples_per_instance, fixture.seed)
    unstable = count_unstable(net1, bounds1) + count_unstable(net2, bounds2) > 0
    pairs = _pairs(fixture)

    for pair in pairs:
        outcome.checks["soundness"] += 1
        bound = verifier.bound_pair(net1, net2, region, pair, bounds1=bounds1, bounds2=bounds2)
        oracle = sample_extrema(net1, net2, region, pair, audit.samples_per_instance, fixture.seed)
        if bound.lower is None or bound.upper is None:
            outcome.unavailable += 1
        if bound.lower is not None and bound.lower > oracle.sampled_min + SOUNDNESS_TOL:
            violate("soundness", delta, pair, lower=bound.lower, sampled_min=oracle.sampled_min,
                    witness=oracle.argmin.tolist())
        if bound.upper is not None and oracle.sampled_max > bound.upper + SOUNDNESS_TOL:
            violate("soundness", delta, pair, upper=bound.upper, sampled_max=oracle.sampled_max,
                    witness=oracle.argmax.tolist())

        outcome.checks["joint_vs_independent"] += 1
        comparison = verifier.compare_independent(net1, net2, region, pair, bounds1, bounds2)
        if comparison.independent_sum > comparison.joint + SOUNDNESS_TOL:
            violate("joint_vs_independent", delta, pair, joint=comparison.joint,
                    independent_sum=comparison.independent_sum)
        if unstable:
            outcome.unstable_instances += 1
            outcome.improvements.append(comparison.improvement)
            if comparison.improvement > 0:
                outcome.improved_instances += 1

        outcome.checks["containment"] += 1
        lp = build_joint_lp(net1, net2, region, pair, bounds1, bounds2, options=verifier.options.relax)
        worst, witness = relaxation_violation(lp, net1, net2, points[: audit.containment_points])
        if worst > CONTAINMENT_TOL:
            violate("containment", delta, pair, max_violation=worst, witness=witness.tolist())

    outcome.checks["decision"] += 1
    report = verifier.verify_implication(
        net1, net2, fixture.center, fixture.label, delta,
        allow_misclassified=True, sample_id=f"trial{outcome.trial}",
    )
    if report.implied:
        found = decision_counterexamples(net1, net2, points, fixture.label)
        if found:
            violate("decision", delta, None, counterexamples=found, label=fixture.label)

    if not first:
        return

    uniform = uniform_constant_network(net1.input_size, net1.num_classes)
    uniform_bounds = verifier.compute_bounds(uniform, region)
    for pair in pairs:
        outcome.checks["uniform"] += 1
        comparison = verifier.compare_independent(net1, uniform, region, pair, bounds1, uniform_bounds)
        if abs(comparison.joint - comparison.independent_sum) > UNIFORM_TOL:
            violate("uniform", delta, pair, joint=comparison.joint, independent_sum=comparison.independent_sum)

    chain = verifier.chain_transitivity([net1, net2, net3], region, pairs)
    for link in chain.links:
        outcome.checks["transitivity"] += 1
        if link.all_adjacent_positive:
            outcome.positive_chains.append({"trial": outcome.trial, "delta": delta, **link.to_dict()})
        if not link.agreement:
            outcome.disagreements += 1
        if link.counterexample:
            outcome.counterexamples += 1


def _pairs(fixture) -> Sequence[ClassPair]:
    classes = fixture.networks[0].num_classes
    return [ClassPair(fixture.label, j) for j in range(classes) if j != fixture.label]
