"""
Tests for the sampling oracles and the seeded fixtures.
"""

import numpy as np
import pytest

from src.core.domain_services.model import forward, predict
from src.core.domain_services.oracle import (
    FixtureKind,
    decision_counterexamples,
    generator,
    grid_extrema,
    make_fixture,
    region_samples,
    robustness_violation,
    sample_extrema,
    uniform_constant_network,
)
from src.core.entities.network import ClassPair
from src.core.entities.region import InputRegion
from src.core.exceptions import ShapeError


class TestSampling:
    """Test cases for region sampling."""

    def test_deterministic_for_a_seed(self):
        region = InputRegion([0.2, 0.4, 0.6], 0.1)

        first = region_samples(region, 50, seed=9)
        second = region_samples(region, 50, seed=9)
        other = region_samples(region, 50, seed=10)

        assert np.array_equal(first, second)
        assert not np.array_equal(first, other)

    def test_center_corners_and_box(self):
        region = InputRegion([0.5, 0.5], 0.25, 0.0, 0.6)

        points = region_samples(region, 20, seed=0)

        assert points.shape == (1 + 20 + 4, 2)
        assert points[0].tolist() == [0.5, 0.5]
        assert np.all(points >= 0.25 - 1e-12)
        assert np.all(points <= 0.6 + 1e-12)
        assert np.isclose(points, 0.6).all(axis=1).any()

    def test_corners_can_be_skipped(self):
        points = region_samples(InputRegion([0.0, 0.0], 1.0), 5, seed=0, include_corners=False)

        assert points.shape == (6, 2)

    def test_needs_a_sample(self):
        with pytest.raises(ValueError):
            region_samples(InputRegion([0.0], 1.0), 0, seed=0)

    def test_generator_is_pcg64(self):
        assert isinstance(generator(3).bit_generator, np.random.PCG64)
        assert generator(3).random() == generator(3).random()


class TestExtrema:
    """Test cases for the ln RPR oracles."""

    def test_demo_extrema(self, demo_pair):
        implied, implier = demo_pair
        region = InputRegion([0.5, 0.5], 0.3)

        sampled = sample_extrema(implied, implier, region, ClassPair(0, 1), n=500, seed=1)
        grid = grid_extrema(implied, implier, region, ClassPair(0, 1), points_per_dim=61)

        assert sampled.sampled_min == pytest.approx(0.2)
        assert sampled.sampled_max == pytest.approx(0.5)
        assert grid.sampled_min == pytest.approx(0.2)
        assert grid.sampled_max == pytest.approx(0.5)
        assert grid.num_samples == 61 * 61
        assert grid.argmax[0] == pytest.approx(0.8)

    def test_grid_limited_to_small_inputs(self, small_conv):
        region = InputRegion(np.zeros(16), 0.1)

        with pytest.raises(ShapeError, match="at most"):
            grid_extrema(small_conv, small_conv, region, ClassPair(0, 1))

    def test_degenerate_axis_gets_one_point(self, demo_pair):
        implied, implier = demo_pair
        region = InputRegion([0.5, 0.5], 0.3, [0.0, 0.5], [1.0, 0.5])

        grid = grid_extrema(implied, implier, region, ClassPair(0, 1), points_per_dim=11)

        assert grid.num_samples == 11

    def test_oracle_result_serializes(self, demo_pair):
        result = sample_extrema(*demo_pair, InputRegion([0.5, 0.5], 0.1), ClassPair(0, 1), n=10, seed=4)

        payload = result.to_dict()

        assert payload["seed"] == 4
        assert len(payload["argmin"]) == 2


class TestCounterexamples:
    """Test cases for the decision and robustness oracles."""

    def test_demo_has_no_decision_counterexample(self, demo_pair):
        implied, implier = demo_pair
        points = region_samples(InputRegion([0.5, 0.5], 0.3), 2000, seed=3)

        assert decision_counterexamples(implied, implier, points, label=0) == 0
        # the converse fails near the low corner
        assert decision_counterexamples(implier, implied, points, label=0) > 0

    def test_implier_robustness_violation(self, demo_pair):
        implied, implier = demo_pair
        region = InputRegion([0.5, 0.5], 0.3)

        witness = robustness_violation(implier, region, label=0, n=500, seed=0)

        assert witness is not None
        assert predict(implier, witness) != 0
        assert robustness_violation(implied, region, label=0, n=500, seed=0) is None


class TestFixtures:
    """Test cases for the seeded scenarios."""

    def test_random_fixture_is_reproducible(self):
        first = make_fixture(FixtureKind.RANDOM_SMALL, seed=21, count=3)
        second = make_fixture(FixtureKind.RANDOM_SMALL, seed=21, count=3)

        assert len(first.networks) == 3
        assert all(a == b for a, b in zip(first.networks, second.networks))
        assert np.array_equal(first.center, second.center)
        assert first.label == predict(first.networks[0], first.center)

    def test_random_fixture_shapes(self):
        fixture = make_fixture(FixtureKind.RANDOM_SMALL, seed=5, input_dim=4, num_classes=3)

        assert fixture.networks[0].input_size == 4
        assert fixture.networks[1].num_classes == 3
        assert fixture.networks[0] != fixture.networks[1]

    def test_uniform_fixture(self):
        fixture = make_fixture(FixtureKind.UNIFORM_CONSTANT, seed=2)

        uniform = fixture.networks[1]
        assert np.all(forward(uniform, fixture.center) == 0.0)

    def test_demo_fixture(self):
        fixture = make_fixture(FixtureKind.DEMO_PAIR)

        assert fixture.region.delta == 0.3
        assert fixture.label == 0
        assert [net.name for net in fixture.networks] == ["demo-implied", "demo-implier"]

    def test_uniform_network_logits(self):
        net = uniform_constant_network(3, 4)

        assert forward(net, [1.0, -2.0, 5.0]).tolist() == [0.0, 0.0, 0.0, 0.0]
