"""
Tests for the implication verifier.

Small networks are checked against hand-derived bounds and against the
sampling oracle.
"""

import math

import numpy as np
import pytest

from src.core.domain_services.model import log_rpr
from src.core.domain_services.oracle import (
    FixtureKind,
    make_fixture,
    sample_extrema,
    uniform_constant_network,
)
from src.core.domain_services.verification import ImplicationVerifier, VerifierOptions
from src.core.entities.linear_program import LinearProgram, ProblemVariant
from src.core.entities.lp_solution import LpSolution, LpStatus
from src.core.entities.network import ClassPair
from src.core.entities.region import InputRegion
from src.core.exceptions import ClassIndexError, CompatibilityError, ConfigurationError
from src.core.interfaces.lp_solver import LpSolverInterface, SolverError

TOL = 1e-7


class FixedStatusSolver(LpSolverInterface):
    """Reports the same status for every program."""

    def __init__(self, status: LpStatus):
        self.status = status
        self.names = []

    @property
    def feas_tol(self) -> float:
        return 1e-9

    def solve(self, lp: LinearProgram) -> LpSolution:
        self.names.append(lp.name)
        return LpSolution(self.status, math.nan, np.zeros(lp.num_vars), 0, 0.0)


def _scaled_logits(net, factor):
    """Copy of ``net`` whose final Dense layer is multiplied by ``factor``."""
    last = net.layers[-1]
    layers = list(net.layers[:-1]) + [last.with_parameters(last.weights * factor, last.bias * factor)]
    return net.with_layers(layers, name=f"{net.name}-x{factor:g}")


class TestVerifierOptions:
    """Test cases for verifier options."""

    def test_unknown_bound_method(self):
        with pytest.raises(ConfigurationError, match="Unknown bound method"):
            VerifierOptions(bound_method="zonotope")

    def test_negative_decision_tolerance(self):
        with pytest.raises(ConfigurationError, match="decision_tol"):
            VerifierOptions(decision_tol=-1e-9)


class TestBoundPair:
    """Test cases for relaxed pair bounds."""

    def test_demo_bounds(self, verifier, demo_pair):
        implied, implier = demo_pair

        bound = verifier.bound_pair(implied, implier, InputRegion([0.5, 0.5], 0.3), ClassPair(0, 1))

        assert bound.lower_status == LpStatus.OPTIMAL
        assert bound.lower == pytest.approx(0.2, abs=TOL)
        assert bound.upper == pytest.approx(0.5, abs=1e-6)

    def test_antisymmetry(self, verifier):
        fixture = make_fixture(FixtureKind.RANDOM_SMALL, seed=4)
        net1, net2 = fixture.networks
        region = fixture.region
        pair = ClassPair(0, 1)

        forward = verifier.bound_pair(net1, net2, region, pair)
        backward = verifier.bound_pair(net2, net1, region, pair)

        assert forward.lower == pytest.approx(-backward.upper, abs=1e-9)
        assert forward.upper == pytest.approx(-backward.lower, abs=1e-9)

    def test_exact_at_zero_radius(self, verifier):
        fixture = make_fixture(FixtureKind.RANDOM_SMALL, seed=8, num_classes=3)
        net1, net2 = fixture.networks
        region = InputRegion(fixture.center, 0.0)

        for pair in (ClassPair(0, 1), ClassPair(2, 0)):
            bound = verifier.bound_pair(net1, net2, region, pair)
            exact = log_rpr(net1, net2, fixture.center, pair)
            assert bound.lower == pytest.approx(exact, abs=1e-6)
            assert bound.upper == pytest.approx(exact, abs=1e-6)

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_sandwiches_sampled_values(self, verifier, seed):
        fixture = make_fixture(FixtureKind.RANDOM_SMALL, seed=seed, delta=0.1)
        net1, net2 = fixture.networks
        pair = ClassPair(0, 1)

        bound = verifier.bound_pair(net1, net2, fixture.region, pair)
        sampled = sample_extrema(net1, net2, fixture.region, pair, n=2000, seed=seed)

        assert bound.lower <= sampled.sampled_min + 1e-6
        assert bound.upper >= sampled.sampled_max - 1e-6

    def test_monotone_in_radius(self, verifier):
        fixture = make_fixture(FixtureKind.RANDOM_SMALL, seed=6)
        net1, net2 = fixture.networks
        pair = ClassPair(0, 1)

        lowers = [
            verifier.bound_pair(net1, net2, InputRegion(fixture.center, delta), pair).lower
            for delta in (0.01, 0.05, 0.2)
        ]

        assert lowers[0] >= lowers[1] - TOL
        assert lowers[1] >= lowers[2] - TOL

    def test_independent_variant_rejected(self, verifier, demo_pair):
        with pytest.raises(ConfigurationError, match="joint variant"):
            verifier.bound_pair(
                *demo_pair, InputRegion([0.5, 0.5], 0.1), ClassPair(0, 1), ProblemVariant.INDEPENDENT_NET1
            )

    def test_unsolved_direction_is_unavailable(self, demo_pair):
        solver = FixedStatusSolver(LpStatus.ITERATION_LIMIT)
        bound = ImplicationVerifier(solver).bound_pair(*demo_pair, InputRegion([0.5, 0.5], 0.1), ClassPair(0, 1))

        assert bound.lower is None
        assert bound.upper is None
        assert bound.lower_status == LpStatus.ITERATION_LIMIT

    def test_infeasible_margin_program_is_an_error(self, demo_pair):
        verifier = ImplicationVerifier(FixedStatusSolver(LpStatus.INFEASIBLE))

        with pytest.raises(SolverError, match="infeasible"):
            verifier.bound_pair(*demo_pair, InputRegion([0.5, 0.5], 0.1), ClassPair(0, 1))

    def test_infeasible_pure_program_is_vacuous(self, demo_pair):
        verifier = ImplicationVerifier(FixedStatusSolver(LpStatus.INFEASIBLE))

        bound = verifier.bound_pair(
            *demo_pair, InputRegion([0.5, 0.5], 0.1), ClassPair(0, 1), ProblemVariant.JOINT_PURE_IMPLICATION
        )

        assert bound.lower == math.inf
        assert bound.upper == -math.inf

    def test_lp_sink_sees_every_program(self, solver, demo_pair):
        seen = []
        verifier = ImplicationVerifier(solver, lp_sink=lambda lp: seen.append(lp.name))

        verifier.bound_pair(*demo_pair, InputRegion([0.5, 0.5], 0.1), ClassPair(0, 1))

        assert seen == [
            "margin_demo-implied_demo-implier_0_1",
            "margin_demo-implier_demo-implied_0_1",
        ]


class TestVerifyImplication:
    """Test cases for the per-sample decision."""

    def test_identical_networks_at_zero_radius(self, verifier, small_dense):
        report = verifier.verify_implication(small_dense, small_dense, [1.0, 0.5], label=0, delta=0.0)

        assert report.implied
        assert report.reverse_implied
        assert abs(report.min_lower) <= 1e-9

    def test_sharper_network_is_implied(self, verifier, demo_pair):
        _, implier = demo_pair
        sharper = _scaled_logits(implier, 2.0)

        report = verifier.verify_implication(sharper, implier, [0.5, 0.5], label=0, delta=0.0)

        # the implier's margin at the center is 0.15
        assert report.min_lower == pytest.approx(0.15, abs=TOL)
        assert report.implied
        assert not report.reverse_implied

    def test_demo_decision(self, verifier, demo_pair):
        implied, implier = demo_pair

        report = verifier.verify_implication(implied, implier, [0.5, 0.5], label=0, delta=0.3, sample_id="c")

        assert report.sample_id == "c"
        assert report.implied
        assert not report.reverse_implied
        assert [b.pair for b in report.pair_bounds] == [ClassPair(0, 1)]

    def test_threshold_raises_the_bar(self, verifier, demo_pair):
        implied, implier = demo_pair

        report = verifier.verify_implication(implied, implier, [0.5, 0.5], label=0, delta=0.3, threshold=0.25)

        assert not report.implied
        assert report.threshold == 0.25

    def test_pure_variant_decision(self, verifier, demo_pair):
        implied, implier = demo_pair

        report = verifier.verify_implication(
            implied, implier, [0.5, 0.5], label=0, delta=0.3, variant=ProblemVariant.JOINT_PURE_IMPLICATION
        )

        assert report.variant == ProblemVariant.JOINT_PURE_IMPLICATION
        assert report.implied

    def test_misclassified_center_is_skipped(self, verifier, demo_pair):
        implied, implier = demo_pair

        report = verifier.verify_implication(implied, implier, [0.2, 0.2], label=0, delta=0.05)

        assert report.skipped
        assert "misclassified" in report.skip_reason
        assert not report.implied

    def test_misclassified_center_allowed(self, verifier, demo_pair):
        implied, implier = demo_pair

        report = verifier.verify_implication(
            implied, implier, [0.2, 0.2], label=0, delta=0.05, allow_misclassified=True
        )

        assert not report.skipped
        assert report.implied

    def test_full_matrix_reports_every_pair(self, verifier):
        fixture = make_fixture(FixtureKind.RANDOM_SMALL, seed=13, num_classes=3)
        net1, net2 = fixture.networks

        report = verifier.verify_implication(
            net1, net2, fixture.center, fixture.label, 0.01, allow_misclassified=True, full_matrix=True
        )

        assert len(report.pair_bounds) == 6
        assert all(b.pair.i == fixture.label for b in report.pair_bounds[:2])

    def test_full_matrix_aggregates_only_deciding_pairs(self, verifier):
        fixture = make_fixture(FixtureKind.RANDOM_SMALL, seed=2, num_classes=3)
        base = fixture.networks[0]
        sharper = _scaled_logits(base, 2.0)

        # at zero radius ln RPR(i, j) is the base logit gap z_i - z_j
        report = verifier.verify_implication(sharper, base, fixture.center, fixture.label, 0.0, full_matrix=True)

        extra = [b for b in report.pair_bounds if not b.deciding]
        assert len(report.pair_bounds) == 6
        assert len(extra) == 4
        assert all(b.pair.i != fixture.label for b in extra)
        assert min(b.lower for b in extra) < 0.0
        assert report.implied
        assert report.min_lower == min(b.lower for b in report.deciding_bounds)
        assert report.min_lower >= report.threshold - report.decision_tol
        assert report.max_upper == max(b.upper for b in report.deciding_bounds)

        payload = report.to_dict()
        assert payload["min_lower"] == report.min_lower
        assert [entry["deciding"] for entry in payload["pair_bounds"]] == [True, True, False, False, False, False]

    def test_decision_tolerance_is_applied_and_recorded(self, solver, demo_pair):
        implied, implier = demo_pair
        strict = ImplicationVerifier(solver, VerifierOptions(decision_tol=0.0))
        lenient = ImplicationVerifier(solver, VerifierOptions(decision_tol=1e-2))

        # the demo lower bound is 0.2, just under this threshold
        kwargs = dict(label=0, delta=0.3, threshold=0.205)
        strict_report = strict.verify_implication(implied, implier, [0.5, 0.5], **kwargs)
        lenient_report = lenient.verify_implication(implied, implier, [0.5, 0.5], **kwargs)

        assert not strict_report.implied
        assert lenient_report.implied
        assert strict_report.to_dict()["decision_tol"] == 0.0
        assert lenient_report.decision_tol == 1e-2

    def test_unavailable_bound_fails_safe(self, demo_pair):
        verifier = ImplicationVerifier(FixedStatusSolver(LpStatus.NUMERICAL_ERROR))

        report = verifier.verify_implication(*demo_pair, [0.5, 0.5], label=0, delta=0.1)

        assert not report.implied
        assert not report.reverse_implied
        assert report.min_lower is None

    def test_domain_clips_region(self, verifier, demo_pair):
        implied, implier = demo_pair

        report = verifier.verify_implication(implied, implier, [0.5, 0.5], label=0, delta=0.3, domain=(0.45, 0.55))

        assert report.pair_bounds[0].upper == pytest.approx(0.25, abs=1e-6)

    def test_label_out_of_range(self, verifier, demo_pair):
        with pytest.raises(ClassIndexError):
            verifier.verify_implication(*demo_pair, [0.5, 0.5], label=2, delta=0.1)

    def test_incompatible_networks(self, verifier, small_dense, small_conv):
        with pytest.raises(CompatibilityError):
            verifier.verify_implication(small_dense, small_conv, [0.5, 0.5], label=0, delta=0.1)

    def test_lp_bounds_agree_on_demo(self, solver, demo_pair):
        verifier = ImplicationVerifier(solver, VerifierOptions(bound_method="lp"))

        report = verifier.verify_implication(*demo_pair, [0.5, 0.5], label=0, delta=0.3)

        assert report.bound_method == "lp"
        assert report.implied


class TestCompareIndependent:
    """Test cases for joint versus independent analysis."""

    @pytest.mark.parametrize("seed", [0, 3, 7])
    def test_joint_is_never_looser(self, verifier, seed):
        fixture = make_fixture(FixtureKind.RANDOM_SMALL, seed=seed, delta=0.1)
        net1, net2 = fixture.networks

        result = verifier.compare_independent(net1, net2, fixture.region, ClassPair(0, 1))

        assert result.independent_lower <= result.joint_lower + 1e-6
        assert result.independent_upper >= result.joint_upper - 1e-6
        assert result.improvement >= -1e-4

    def test_uniform_reference_is_degenerate(self, verifier):
        fixture = make_fixture(FixtureKind.UNIFORM_CONSTANT, seed=5)
        net1, uniform = fixture.networks

        result = verifier.compare_independent(net1, uniform, fixture.region, ClassPair(0, 1))

        assert abs(result.joint_lower - result.independent_lower) <= 1e-9
        assert abs(result.joint_upper - result.independent_upper) <= 1e-9

    def test_demo_gains_from_shared_input(self, verifier, demo_pair):
        result = verifier.compare_independent(*demo_pair, InputRegion([0.5, 0.5], 0.3), ClassPair(0, 1))

        assert result.joint_lower == pytest.approx(0.2, abs=TOL)
        assert result.independent_lower < 0.0
        assert result.improvement > 50.0


class TestChainTransitivity:
    """Test cases for the transitivity audit."""

    def test_needs_three_networks(self, verifier, demo_pair):
        with pytest.raises(ConfigurationError, match="at least 3"):
            verifier.chain_transitivity(list(demo_pair), InputRegion([0.5, 0.5], 0.1), [ClassPair(0, 1)])

    def test_scaled_chain(self, verifier, demo_pair):
        _, base = demo_pair
        chain = [_scaled_logits(base, 4.0), _scaled_logits(base, 2.0), base]

        report = verifier.chain_transitivity(chain, InputRegion([0.5, 0.5], 0.0), [ClassPair(0, 1)])

        link = report.links[0]
        assert link.all_adjacent_positive
        assert link.end_to_end_positive
        assert report.consistent
        assert report.to_dict()["networks"] == [net.name for net in chain]

    def test_random_chain_reports_without_raising(self, verifier):
        fixture = make_fixture(FixtureKind.RANDOM_SMALL, seed=17, count=3)

        report = verifier.chain_transitivity(list(fixture.networks), fixture.region, [ClassPair(0, 1)])

        assert len(report.links) == 1
        assert len(report.links[0].adjacent_lowers) == 2


class TestCertifyRobustness:
    """Test cases for single-network robustness certificates."""

    def test_demo_networks(self, verifier, demo_pair):
        implied, implier = demo_pair
        region = InputRegion([0.5, 0.5], 0.3)

        robust = verifier.certify_robustness(implied, region, label=0)
        fragile = verifier.certify_robustness(implier, region, label=0)

        assert robust.certified
        # implied margin relu(x1 - 0.5) + x1 + 0.1 x2 - 0.2 is smallest at the low corner
        assert robust.margins[1] == pytest.approx(0.02, abs=TOL)
        assert not fragile.certified
        assert fragile.margins[1] == pytest.approx(-0.18, abs=TOL)

    def test_label_out_of_range(self, verifier, demo_pair):
        with pytest.raises(ClassIndexError):
            verifier.certify_robustness(demo_pair[0], InputRegion([0.5, 0.5], 0.1), label=5)
