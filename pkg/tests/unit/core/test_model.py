"""
Tests for the forward model and the prediction ratios.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from src.core.domain_services.model import (
    check_compatible,
    forward,
    forward_batch,
    layer_activations,
    log_pr,
    log_rpr,
    log_rpr_batch,
    predict,
    require_compatible,
    softmax,
)
from src.core.entities.layer import LayerSpec
from src.core.entities.network import ClassPair, Network
from src.core.exceptions import ClassIndexError, CompatibilityError, NumericError, ShapeError

finite_logits = arrays(np.float64, st.integers(2, 6), elements=st.floats(-50, 50))


class TestForward:
    """Test cases for network evaluation."""

    def test_dense_relu_by_hand(self, small_dense):
        # hidden = (0.5, 0.5, 0.1), all active
        logits = forward(small_dense, [1.0, 0.5])

        assert logits == pytest.approx([0.6, 0.4])

    def test_relu_clips_negative_units(self, small_dense):
        # hidden pre = (-1.0, 0.25, 2.1)
        logits = forward(small_dense, [0.0, 1.0])

        assert logits == pytest.approx([-1.9, 2.15])

    def test_batch_matches_single(self, small_conv):
        rng = np.random.default_rng(3)
        batch = rng.uniform(-1, 1, size=(5, 4, 4, 1))

        stacked = np.stack([forward(small_conv, x) for x in batch])

        assert np.allclose(forward_batch(small_conv, batch), stacked)

    def test_flat_inputs_accepted(self, small_conv):
        image = np.arange(16, dtype=float).reshape(4, 4, 1) / 16

        assert np.allclose(forward(small_conv, image.ravel()), forward(small_conv, image))

    def test_wrong_input_size(self, small_dense):
        with pytest.raises(ShapeError, match="does not match"):
            forward(small_dense, [1.0, 2.0, 3.0])

    def test_conv_agrees_with_affine_lowering(self, small_conv):
        conv = small_conv.layers[0]
        matrix, bias = conv.as_affine()
        x = np.random.default_rng(7).normal(size=16)

        expected = layer_activations(small_conv, x)[1]

        assert np.allclose(matrix @ x + bias, expected)

    def test_layer_activations_lengths(self, small_conv):
        values = layer_activations(small_conv, np.zeros(16))

        assert [v.size for v in values] == small_conv.layer_sizes()

    def test_max_pool_takes_window_maximum(self):
        net = Network([LayerSpec.max_pool2d((2, 2, 1), 2), LayerSpec.flatten((1, 1, 1))])

        assert forward(net, [0.1, -3.0, 0.7, 0.2]).tolist() == [0.7]


class TestSoftmax:
    """Test cases for softmax."""

    @given(finite_logits, st.floats(-100, 100))
    @settings(max_examples=50, deadline=None)
    def test_shift_invariant(self, logits, shift):
        assert np.allclose(softmax(logits), softmax(logits + shift))

    @given(finite_logits)
    @settings(max_examples=50, deadline=None)
    def test_probabilities(self, logits):
        probs = softmax(logits)

        assert np.all(probs >= 0)
        assert probs.sum() == pytest.approx(1.0)

    def test_large_logits_do_not_overflow(self):
        assert softmax([1000.0, 1000.0]).tolist() == [0.5, 0.5]

    def test_non_finite_rejected(self):
        with pytest.raises(NumericError):
            softmax([0.0, np.inf])


class TestRatios:
    """Test cases for prediction ratios and compatibility."""

    def test_predict_ties_pick_smallest_index(self):
        net = Network([LayerSpec.dense(np.zeros((3, 2)), np.zeros(3))])

        assert predict(net, [0.3, 0.4]) == 0

    def test_log_pr_is_logit_difference(self, small_dense):
        logits = forward(small_dense, [0.2, 0.9])

        assert log_pr(small_dense, [0.2, 0.9], ClassPair(1, 0)) == pytest.approx(logits[1] - logits[0])

    def test_log_pr_matches_softmax_ratio(self, small_dense):
        x = [0.4, -0.3]
        probs = softmax(forward(small_dense, x))

        assert log_pr(small_dense, x, ClassPair(0, 1)) == pytest.approx(np.log(probs[0] / probs[1]))

    def test_log_pr_pair_out_of_range(self, small_dense):
        with pytest.raises(ClassIndexError):
            log_pr(small_dense, [0.0, 0.0], ClassPair(0, 2))

    def test_log_rpr_antisymmetric(self, demo_pair):
        implied, implier = demo_pair
        x = [0.7, 0.3]
        pair = ClassPair(0, 1)

        forward_value = log_rpr(implied, implier, x, pair)

        assert forward_value == pytest.approx(-log_rpr(implier, implied, x, pair))
        assert forward_value == pytest.approx(-log_rpr(implied, implier, x, pair.swapped()))
        # relu(0.7 - 0.5) + 0.2
        assert forward_value == pytest.approx(0.4)

    def test_log_rpr_of_identical_networks_is_zero(self, small_dense):
        assert log_rpr(small_dense, small_dense, [0.3, 0.1], ClassPair(0, 1)) == 0.0

    def test_log_rpr_batch(self, demo_pair):
        implied, implier = demo_pair
        points = np.array([[0.2, 0.2], [0.8, 0.5], [0.5, 0.5]])

        values = log_rpr_batch(implied, implier, points, ClassPair(0, 1))

        assert values == pytest.approx([0.2, 0.5, 0.2])

    def test_compatibility(self, small_dense, small_conv, demo_pair):
        assert check_compatible(*demo_pair)
        assert check_compatible(small_dense, demo_pair[0])
        assert not check_compatible(small_dense, small_conv)
        with pytest.raises(CompatibilityError, match="not compatible"):
            require_compatible(small_dense, small_conv)
        with pytest.raises(CompatibilityError):
            log_rpr(small_dense, small_conv, np.zeros(2), ClassPair(0, 1))
