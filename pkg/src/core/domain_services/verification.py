"""
Verification service - relaxed ln RPR bounds and the implication decision.

The lower bound of a class pair is the minimum of the joint program for
(net1, net2); the upper bound is the negated minimum of the same program
with the networks swapped. N2 => N1 holds on a region when every pair
(c, j) against the correct class c has a lower bound at or above the
threshold; N1 => N2 is read off the upper bounds of the same pairs.
"""

import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from ..entities.bounds_map import BoundsMap
from ..entities.linear_program import LinearProgram, ProblemVariant
from ..entities.lp_solution import LpSolution, LpStatus
from ..entities.network import ClassPair, Network
from ..entities.region import InputRegion
from ..entities.verification import (
    ChainLink,
    ChainReport,
    ComparisonResult,
    ImplicationReport,
    PairBound,
    RobustnessReport,
)
from ..exceptions import ClassIndexError, ConfigurationError
from ..interfaces.lp_solver import LpSolverInterface, SolverError
from .bound_refinement import BoundRefiner
from .bounds import propagate_intervals
from .model import predict, require_compatible
from .relax import RelaxOptions, build_joint_lp, build_network_lp

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VerifierOptions:
    """
    Verification knobs.

    Attributes:
        relax: Relaxation options shared by every program
        bound_method: "interval" or "lp" (interval bounds refined by LPs)
        decision_tol: Solver-accuracy allowance when comparing a bound with
            the threshold
    """

    relax: RelaxOptions = field(default_factory=RelaxOptions)
    bound_method: str = "interval"
    decision_tol: float = 1e-9

    def __post_init__(self):
        if self.bound_method not in ("interval", "lp"):
            raise ConfigurationError(f"Unknown bound method '{self.bound_method}' (use 'interval' or 'lp')")
        if self.decision_tol < 0:
            raise ConfigurationError(f"decision_tol must be non-negative, got {self.decision_tol}")


class ImplicationVerifier:
    """
    Computes relaxed bounds and implication decisions for compatible networks.

    One instance is safe to use from several threads as long as the solver
    is; all state lives in local variables.
    """

    def __init__(
        self,
        solver: LpSolverInterface,
        options: Optional[VerifierOptions] = None,
        lp_sink: Optional[Callable[[LinearProgram], None]] = None,
    ):
        """
        Initialize the verifier.

        Args:
            solver: Minimizer for the relaxed programs
            options: Verification options
            lp_sink: Optional callback receiving every program before it is
                solved (used to export LP files)
        """
        self._solver = solver
        self._options = options or VerifierOptions()
        self._lp_sink = lp_sink
        self._refiner = BoundRefiner(solver, self._options.relax)

    @property
    def options(self) -> VerifierOptions:
        return self._options

    # Building blocks

    def compute_bounds(self, net: Network, region: InputRegion) -> BoundsMap:
        """Interval bounds, refined by LPs when the bound method is ``lp``."""
        bounds = propagate_intervals(net, region)
        if self._options.bound_method == "lp":
            bounds = self._refiner.refine(net, region, bounds)
        return bounds

    def _solve(self, lp: LinearProgram) -> LpSolution:
        if self._lp_sink is not None:
            self._lp_sink(lp)
        return self._solver.solve(lp)

    def _direction(self, lp: LinearProgram, variant: ProblemVariant) -> tuple:
        solution = self._solve(lp)
        if solution.status == LpStatus.OPTIMAL:
            return solution.objective, solution.status
        if solution.status == LpStatus.INFEASIBLE:
            if variant == ProblemVariant.JOINT_PURE_IMPLICATION:
                # the reference network never prefers class i over j here
                return math.inf, solution.status
            raise SolverError(f"{lp.name}: relaxed program reported infeasible")
        logger.warning(f"{lp.name}: {solution.status.value}, bound unavailable")
        return None, solution.status

    def bound_pair(
        self,
        net1: Network,
        net2: Network,
        region: InputRegion,
        pair: ClassPair,
        variant: ProblemVariant = ProblemVariant.JOINT_MARGIN,
        bounds1: Optional[BoundsMap] = None,
        bounds2: Optional[BoundsMap] = None,
    ) -> PairBound:
        """
        Relaxed lower and upper bounds on ln RPR of net1 w.r.t. net2.

        Args:
            net1: Network in the numerator
            net2: Reference network
            region: Input region
            pair: Class pair (i, j)
            variant: JOINT_MARGIN or JOINT_PURE_IMPLICATION
            bounds1: Precomputed bounds of net1 (computed when omitted)
            bounds2: Precomputed bounds of net2 (computed when omitted)

        Returns:
            PairBound; a direction that did not solve has a ``None`` bound

        Raises:
            SolverError: If a margin program is infeasible
        """
        if variant not in (ProblemVariant.JOINT_MARGIN, ProblemVariant.JOINT_PURE_IMPLICATION):
            raise ConfigurationError(f"bound_pair needs a joint variant, got {variant.value}")
        started = time.perf_counter()
        bounds1 = bounds1 or self.compute_bounds(net1, region)
        bounds2 = bounds2 or self.compute_bounds(net2, region)
        relax = self._options.relax

        lower, lower_status = self._direction(
            build_joint_lp(net1, net2, region, pair, bounds1, bounds2, variant, relax), variant
        )
        reverse, upper_status = self._direction(
            build_joint_lp(net2, net1, region, pair, bounds2, bounds1, variant, relax), variant
        )
        upper = None if reverse is None else -reverse
        return PairBound(
            pair=pair,
            lower=lower,
            upper=upper,
            lower_status=lower_status,
            upper_status=upper_status,
            wall_ms=(time.perf_counter() - started) * 1000.0,
        )

    # Decisions

    def verify_implication(
        self,
        net1: Network,
        net2: Network,
        sample,
        label: int,
        delta: float,
        threshold: float = 0.0,
        variant: ProblemVariant = ProblemVariant.JOINT_MARGIN,
        allow_misclassified: bool = False,
        sample_id: str = "sample",
        full_matrix: bool = False,
        domain: Optional[tuple] = None,
    ) -> ImplicationReport:
        """
        Check N2 => N1 (and N1 => N2) on the region around ``sample``.

        Args:
            net1: Candidate implied network
            net2: Candidate implier
            sample: Region center
            label: Correct class of the sample
            delta: Region radius
            threshold: Decision threshold on the lower bounds
            variant: JOINT_MARGIN or JOINT_PURE_IMPLICATION
            allow_misclassified: Verify even if a network misclassifies the center
            sample_id: Identifier copied into the report
            full_matrix: Also bound every other ordered class pair (reported,
                not used for the decision)
            domain: Optional (low, high) input domain

        Returns:
            ImplicationReport, marked skipped when the center is misclassified

        Raises:
            CompatibilityError: If the networks are not compatible
            ClassIndexError: If ``label`` is out of range
        """
        require_compatible(net1, net2)
        if not 0 <= label < net1.num_classes:
            raise ClassIndexError(f"Label {label} out of range for {net1.num_classes} classes")

        method = self._options.bound_method
        if not allow_misclassified:
            predicted = (predict(net1, sample), predict(net2, sample))
            if predicted != (label, label):
                reason = f"center misclassified (net1 -> {predicted[0]}, net2 -> {predicted[1]}, label {label})"
                logger.info(f"Skipping sample '{sample_id}': {reason}")
                return ImplicationReport.skipped_sample(sample_id, label, delta, threshold, variant, reason, method)

        started = time.perf_counter()
        low, high = domain if domain is not None else (None, None)
        region = InputRegion(sample, delta, low, high)
        bounds1 = self.compute_bounds(net1, region)
        bounds2 = self.compute_bounds(net2, region)

        decision_pairs = [ClassPair(label, j) for j in range(net1.num_classes) if j != label]
        pair_bounds = [
            self.bound_pair(net1, net2, region, pair, variant, bounds1, bounds2) for pair in decision_pairs
        ]
        deciding = list(pair_bounds)
        if full_matrix:
            pair_bounds += [
                replace(self.bound_pair(net1, net2, region, ClassPair(i, j), variant, bounds1, bounds2), deciding=False)
                for i in range(net1.num_classes)
                for j in range(net1.num_classes)
                if i != j and i != label
            ]

        tol = self._options.decision_tol
        implied = all(b.lower is not None and b.lower >= threshold - tol for b in deciding)
        reverse_implied = all(b.upper is not None and -b.upper >= threshold - tol for b in deciding)

        report = ImplicationReport(
            sample_id=sample_id,
            correct_class=label,
            delta=float(delta),
            threshold=float(threshold),
            variant=variant,
            pair_bounds=pair_bounds,
            implied=implied,
            reverse_implied=reverse_implied,
            bound_method=method,
            decision_tol=tol,
            wall_ms=(time.perf_counter() - started) * 1000.0,
        )
        logger.info(
            f"Sample '{sample_id}' delta={delta}: implied={implied} reverse={reverse_implied} "
            f"min_lower={report.min_lower}"
        )
        return report

    def compare_independent(
        self,
        net1: Network,
        net2: Network,
        region: InputRegion,
        pair: ClassPair,
        bounds1: Optional[BoundsMap] = None,
        bounds2: Optional[BoundsMap] = None,
    ) -> ComparisonResult:
        """
        Joint versus independent bounds of one class pair.

        The independent lower bound adds min(x_i - x_j) over net1 alone and
        min(-(y_i - y_j)) over net2 alone; the upper bound is built the same
        way from the swapped programs.

        Raises:
            SolverError: If any of the programs does not solve to optimality
        """
        require_compatible(net1, net2)
        bounds1 = bounds1 or self.compute_bounds(net1, region)
        bounds2 = bounds2 or self.compute_bounds(net2, region)
        relax = self._options.relax

        def solve(first, second, b_first, b_second, variant) -> float:
            lp = build_joint_lp(first, second, region, pair, b_first, b_second, variant, relax)
            solution = self._solve(lp)
            if not solution.is_optimal:
                raise SolverError(f"{lp.name}: {solution.status.value} in joint/independent comparison")
            return solution.objective

        joint_lower = solve(net1, net2, bounds1, bounds2, ProblemVariant.JOINT_MARGIN)
        joint_upper = -solve(net2, net1, bounds2, bounds1, ProblemVariant.JOINT_MARGIN)
        independent_lower = (
            solve(net1, net2, bounds1, bounds2, ProblemVariant.INDEPENDENT_NET1)
            + solve(net1, net2, bounds1, bounds2, ProblemVariant.INDEPENDENT_NET2)
        )
        independent_upper = -(
            solve(net2, net1, bounds2, bounds1, ProblemVariant.INDEPENDENT_NET1)
            + solve(net2, net1, bounds2, bounds1, ProblemVariant.INDEPENDENT_NET2)
        )
        return ComparisonResult(pair, joint_lower, joint_upper, independent_lower, independent_upper)

    def chain_transitivity(
        self, networks: Sequence[Network], region: InputRegion, pairs: Sequence[ClassPair]
    ) -> ChainReport:
        """
        Audit transitivity of relaxed lower bounds along a chain N1, ..., Nm.

        Positivity of every adjacent bound m(Nk | Nk+1) is compared with
        positivity of the end-to-end bound m(N1 | Nm). Disagreements are
        logged and reported, never raised.

        Raises:
            ConfigurationError: If fewer than three networks are given
        """
        if len(networks) < 3:
            raise ConfigurationError(f"A chain needs at least 3 networks, got {len(networks)}")
        for first, second in zip(networks, networks[1:]):
            require_compatible(first, second)

        bounds: Dict[int, BoundsMap] = {k: self.compute_bounds(net, region) for k, net in enumerate(networks)}
        last = len(networks) - 1
        links = []
        for pair in pairs:
            adjacent = [
                self._direction(
                    build_joint_lp(
                        networks[k], networks[k + 1], region, pair, bounds[k], bounds[k + 1],
                        ProblemVariant.JOINT_MARGIN, self._options.relax,
                    ),
                    ProblemVariant.JOINT_MARGIN,
                )[0]
                for k in range(last)
            ]
            end_to_end = self._direction(
                build_joint_lp(
                    networks[0], networks[last], region, pair, bounds[0], bounds[last],
                    ProblemVariant.JOINT_MARGIN, self._options.relax,
                ),
                ProblemVariant.JOINT_MARGIN,
            )[0]
            link = ChainLink(pair, adjacent, end_to_end)
            if link.counterexample:
                logger.warning(
                    f"Transitivity counterexample for pair {pair}: adjacent lowers {adjacent}, "
                    f"end-to-end {end_to_end}"
                )
            elif not link.agreement:
                logger.info(f"Pair {pair}: end-to-end bound positive while an adjacent bound is not")
            links.append(link)

        return ChainReport([net.name for net in networks], region.delta, links)

    def certify_robustness(
        self, net: Network, region: InputRegion, label: int, sample_id: str = "sample"
    ) -> RobustnessReport:
        """
        Certified local robustness: min over the region of x_c - x_j for every j.

        Raises:
            ClassIndexError: If ``label`` is out of range
        """
        if not 0 <= label < net.num_classes:
            raise ClassIndexError(f"Label {label} out of range for {net.num_classes} classes")
        bounds = self.compute_bounds(net, region)
        margins: Dict[int, Optional[float]] = {}
        for j in range(net.num_classes):
            if j == label:
                continue
            objective = np.zeros(net.num_classes)
            objective[label], objective[j] = 1.0, -1.0
            lp = build_network_lp(net, region, bounds, objective, self._options.relax)
            lp.name = f"robust_{net.name}_{label}_{j}"
            margins[j] = self._direction(lp, ProblemVariant.JOINT_MARGIN)[0]

        tol = self._options.decision_tol
        certified = all(value is not None and value >= -tol for value in margins.values())
        return RobustnessReport(sample_id, net.name, label, region.delta, margins, certified)
