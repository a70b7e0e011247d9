"""
Tests for magnitude pruning and simulated quantization.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.domain_services.compaction import compaction_summary, prune_mbp, quantize, quantize_tensor, zero_count
from src.core.domain_services.oracle import generator, random_network
from src.core.entities.layer import LayerSpec
from src.core.entities.network import Network
from src.core.entities.quantization import PruneScope, QuantScheme
from src.core.exceptions import ConfigurationError


@pytest.fixture
def layered():
    return Network(
        [
            LayerSpec.dense([[1.0, -0.05], [0.4, -2.0]], [0.1, 3.0]),
            LayerSpec.relu((2,)),
            LayerSpec.dense([[0.5, -0.25]], [0.01]),
        ],
        name="layered",
    )


class TestPruning:
    """Test cases for magnitude-based pruning."""

    def test_zero_fraction_is_identity(self, layered):
        pruned = prune_mbp(layered, 0.0)

        assert pruned == layered
        assert pruned.name == "layered-mbp0"

    def test_joint_threshold_per_layer(self, layered):
        # first layer max |value| is the bias 3.0, threshold 0.6
        pruned = prune_mbp(layered, 0.2)

        first, last = pruned.layers[0], pruned.layers[2]
        assert first.weights.tolist() == [[1.0, 0.0], [0.0, -2.0]]
        assert first.bias.tolist() == [0.0, 3.0]
        # last layer threshold 0.1 keeps 0.5 and -0.25, drops 0.01
        assert last.weights.tolist() == [[0.5, -0.25]]
        assert last.bias.tolist() == [0.0]

    def test_separate_threshold(self, layered):
        pruned = prune_mbp(layered, 0.2, PruneScope.SEPARATE)

        first = pruned.layers[0]
        # weights threshold 0.4, bias threshold 0.6
        assert first.weights.tolist() == [[1.0, 0.0], [0.4, -2.0]]
        assert first.bias.tolist() == [0.0, 3.0]

    def test_full_fraction_keeps_only_the_maximum(self, layered):
        pruned = prune_mbp(layered, 1.0)

        assert pruned.layers[0].bias.tolist() == [0.0, 3.0]
        assert np.count_nonzero(pruned.layers[0].weights) == 0

    def test_fraction_out_of_range(self, layered):
        with pytest.raises(ConfigurationError, match=r"\[0, 1\]"):
            prune_mbp(layered, 1.5)

    @given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    @settings(max_examples=40, deadline=None)
    def test_zeros_grow_with_fraction(self, a, b):
        net = Network([LayerSpec.dense(np.linspace(-1.0, 1.0, 12).reshape(3, 4), [0.3, -0.7, 0.05])])
        low, high = sorted((a, b))

        assert zero_count(prune_mbp(net, low)) <= zero_count(prune_mbp(net, high))

    @pytest.mark.parametrize("scope", [PruneScope.JOINT, PruneScope.SEPARATE])
    @pytest.mark.parametrize("fraction", [0.1, 0.5, 0.9])
    def test_pruning_twice_changes_nothing(self, scope, fraction):
        net = random_network(generator(3), 4, 3, [8, 6], name="seeded")

        once = prune_mbp(net, fraction, scope)
        twice = prune_mbp(once, fraction, scope)

        assert twice == once
        assert zero_count(twice) == zero_count(once)

    def test_source_network_untouched(self, layered):
        before = layered.layers[0].weights.copy()

        prune_mbp(layered, 0.9)

        assert np.array_equal(layered.layers[0].weights, before)


class TestQuantization:
    """Test cases for per-tensor quantization."""

    def test_int8_round_half_to_even(self):
        values = quantize_tensor(np.array([1.0, -1.0, 0.5]), QuantScheme.parse("int8"))

        # 0.5 * 127 = 63.5 rounds to 64
        assert values == pytest.approx([1.0, -1.0, 64 / 127])

    def test_int4_levels(self):
        values = quantize_tensor(np.array([0.7, 0.1, -0.35]), QuantScheme.parse("int4"))

        step = 0.7 / 7
        assert values == pytest.approx([0.7, step, -4 * step])

    def test_all_zero_tensor_passes_through(self):
        assert quantize_tensor(np.zeros(3), QuantScheme.parse("int8")).tolist() == [0.0, 0.0, 0.0]

    def test_float16_round_trip(self):
        values = quantize_tensor(np.array([0.1, 1.0 / 3.0]), QuantScheme.parse("float16"))

        assert values.dtype == np.float64
        assert values == pytest.approx([0.1, 1.0 / 3.0], abs=1e-3)
        assert values[0] != 0.1

    def test_quantize_network(self, layered):
        compact = quantize(layered, QuantScheme.parse("int16"))

        assert compact.name == "layered-int16"
        assert compact.layers[1] == layered.layers[1]
        assert np.allclose(compact.layers[0].weights, layered.layers[0].weights, atol=2.0 / 32767)

    @given(st.lists(st.floats(-10, 10), min_size=1, max_size=20))
    @settings(max_examples=40, deadline=None)
    def test_int8_error_within_half_step(self, raw):
        values = np.array(raw)
        top = np.max(np.abs(values))

        error = np.abs(quantize_tensor(values, QuantScheme.parse("int8")) - values)

        assert np.all(error <= top / 127 / 2 + 1e-12)


    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_int4_error_within_half_step_per_tensor(self, seed):
        net = random_network(generator(seed), 5, 3, [8, 8], name="seeded")
        scheme = QuantScheme.parse("int4")

        compact = quantize(net, scheme)

        for source, target in zip(net.layers, compact.layers):
            if source.weights is None:
                continue
            for original, quantized in ((source.weights, target.weights), (source.bias, target.bias)):
                scale = np.max(np.abs(original)) / 7
                assert np.all(np.abs(original - quantized) <= scale / 2 + 1e-12)
                assert len(np.unique(np.round(quantized / scale))) <= 15


class TestSummary:
    """Test cases for the compaction summary."""

    def test_counts_and_change(self, layered):
        pruned = prune_mbp(layered, 0.2)

        summary = compaction_summary(layered, pruned)

        assert summary["parameters"] == 9
        assert summary["zeros"] == 4
        assert summary["sparsity"] == pytest.approx(4 / 9)
        assert summary["max_abs_change"] == pytest.approx(0.4)
        assert [entry["layer"] for entry in summary["layers"]] == [1, 3]
        assert summary["source"] == "layered"
