"""
Model service - exact forward inference and prediction-ratio quantities.

All arithmetic is float64. Tensors are channels-last; a batch axis is
always leading. Ratios are handled in log space, where the prediction ratio
of classes (i, j) is just a logit difference.
"""

import logging
from typing import List

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..entities.layer import LayerKind, LayerSpec
from ..entities.network import ClassPair, Network
from ..exceptions import CompatibilityError, NumericError, ShapeError

logger = logging.getLogger(__name__)


def _as_batch(net: Network, inputs) -> np.ndarray:
    array = np.asarray(inputs, dtype=np.float64)
    if array.ndim == 0 or array.shape[0] * net.input_size != array.size:
        raise ShapeError(
            f"Input batch of shape {array.shape} does not match network input {net.input_shape}"
        )
    return array.reshape((array.shape[0],) + net.input_shape)


def _as_single(net: Network, values) -> np.ndarray:
    array = np.asarray(values, dtype=np.float64)
    if array.size != net.input_size:
        raise ShapeError(
            f"Input of size {array.size} does not match network input {net.input_shape} "
            f"({net.input_size} values)"
        )
    return array.reshape((1,) + net.input_shape)


def apply_layer(layer: LayerSpec, batch: np.ndarray) -> np.ndarray:
    """
    Apply one layer to a batch shaped (B, *layer.input_shape).
    """
    kind = layer.kind
    if kind == LayerKind.DENSE:
        return batch @ layer.weights.T + layer.bias
    if kind == LayerKind.RELU:
        return np.maximum(batch, 0.0)
    if kind == LayerKind.FLATTEN:
        return batch.reshape(batch.shape[0], -1)
    if kind == LayerKind.ZERO_PAD2D:
        top, bottom, left, right = layer.padding
        return np.pad(batch, ((0, 0), (top, bottom), (left, right), (0, 0)))

    sh, sw = layer.stride
    if kind == LayerKind.CONV2D:
        kh, kw, _, _ = layer.weights.shape
        windows = sliding_window_view(batch, (kh, kw), axis=(1, 2))[:, ::sh, ::sw]
        return np.einsum("bijcxy,xyco->bijo", windows, layer.weights) + layer.bias

    # MaxPool2D
    p = layer.pool_size
    windows = sliding_window_view(batch, (p, p), axis=(1, 2))[:, ::sh, ::sw]
    return windows.max(axis=(-2, -1))


def trace_batch(net: Network, inputs) -> List[np.ndarray]:
    """
    Every layer value for a batch, flattened.

    Returns:
        List of N + 1 arrays of shape (B, size_k); index 0 is the input,
        index k the output of layer k.
    """
    value = _as_batch(net, inputs)
    outputs = [value.reshape(value.shape[0], -1)]
    for layer in net.layers:
        value = apply_layer(layer, value)
        outputs.append(value.reshape(value.shape[0], -1))
    return outputs


def forward_batch(net: Network, inputs) -> np.ndarray:
    """
    Logits for a batch of inputs.

    Args:
        net: The network
        inputs: Array of shape (B, *input_shape) or (B, input_size)

    Returns:
        Array of shape (B, num_classes)

    Raises:
        ShapeError: If the inputs do not match the network input
    """
    value = _as_batch(net, inputs)
    for layer in net.layers:
        value = apply_layer(layer, value)
    return value


def forward(net: Network, values) -> np.ndarray:
    """
    Pre-softmax logits of one input.

    Raises:
        ShapeError: If the input size does not match the network input
    """
    return forward_batch(net, _as_single(net, values))[0]


def layer_activations(net: Network, values) -> List[np.ndarray]:
    """Flattened input followed by the output of every layer, for one input."""
    return [layer_value[0] for layer_value in trace_batch(net, _as_single(net, values))]


def softmax(logits) -> np.ndarray:
    """
    Numerically stable softmax over the last axis.

    Raises:
        NumericError: If any logit is not finite
    """
    logits = np.asarray(logits, dtype=np.float64)
    if not np.all(np.isfinite(logits)):
        raise NumericError("softmax requires finite logits")
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exps = np.exp(shifted)
    return exps / exps.sum(axis=-1, keepdims=True)


def predict(net: Network, values) -> int:
    """Predicted class; the smallest index wins ties."""
    return int(np.argmax(forward(net, values)))


def log_pr(net: Network, values, pair: ClassPair) -> float:
    """
    Natural log of the prediction ratio of classes (i, j), x_i - x_j.

    Raises:
        ClassIndexError: If the pair does not fit the network
    """
    pair.validate_for(net.num_classes)
    logits = forward(net, values)
    return float(logits[pair.i] - logits[pair.j])


def check_compatible(net1: Network, net2: Network) -> bool:
    """True iff both networks have the same input and output dimensions."""
    return net1.input_size == net2.input_size and net1.num_classes == net2.num_classes


def require_compatible(net1: Network, net2: Network) -> None:
    """
    Raises:
        CompatibilityError: If the networks are not compatible
    """
    if not check_compatible(net1, net2):
        raise CompatibilityError(
            f"Networks '{net1.name}' ({net1.input_size} -> {net1.num_classes}) and "
            f"'{net2.name}' ({net2.input_size} -> {net2.num_classes}) are not compatible"
        )


def log_rpr(net1: Network, net2: Network, values, pair: ClassPair) -> float:
    """
    Natural log of the relative prediction ratio of net1 w.r.t. net2.

    Equals (x_i - x_j) - (y_i - y_j) at the shared input.

    Raises:
        CompatibilityError: If the networks are not compatible
        ClassIndexError: If the pair does not fit the networks
    """
    require_compatible(net1, net2)
    return log_pr(net1, values, pair) - log_pr(net2, values, pair)


def log_rpr_batch(net1: Network, net2: Network, inputs, pair: ClassPair) -> np.ndarray:
    """Vectorized ``log_rpr`` over a batch of inputs."""
    require_compatible(net1, net2)
    pair.validate_for(net1.num_classes)
    logits1 = forward_batch(net1, inputs)
    logits2 = forward_batch(net2, inputs)
    return (logits1[:, pair.i] - logits1[:, pair.j]) - (logits2[:, pair.i] - logits2[:, pair.j])
