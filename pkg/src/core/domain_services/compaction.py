"""
Compaction service - magnitude-based pruning and simulated quantization.

Both operations return a new real-valued Network with the same layer
shapes, so the result stays compatible with its source.
"""

import logging
from typing import Any, Dict, Optional

import numpy as np

from ..entities.network import Network
from ..entities.quantization import PruneScope, QuantScheme
from ..exceptions import ConfigurationError

logger = logging.getLogger(__name__)


def _prune_tensor(values: Optional[np.ndarray], threshold: float) -> Optional[np.ndarray]:
    if values is None:
        return None
    return np.where(np.abs(values) < threshold, 0.0, values)


def _max_abs(values: Optional[np.ndarray]) -> float:
    return float(np.max(np.abs(values))) if values is not None and values.size else 0.0


def prune_mbp(net: Network, fraction: float, scope: PruneScope = PruneScope.JOINT) -> Network:
    """
    Zero every weight and bias below ``fraction`` of its layer's largest magnitude.

    Args:
        net: Source network
        fraction: Threshold as a fraction of the maximum, in [0, 1]
        scope: JOINT shares one maximum over a layer's weights and biases;
            SEPARATE uses one maximum per tensor

    Returns:
        The pruned network, named ``<name>-mbp<fraction>``

    Raises:
        ConfigurationError: If ``fraction`` is outside [0, 1]
    """
    if not 0.0 <= fraction <= 1.0:
        raise ConfigurationError(f"Pruning fraction must lie in [0, 1], got {fraction}")

    layers = []
    for layer in net.layers:
        if layer.weights is None:
            layers.append(layer)
            continue
        if scope == PruneScope.JOINT:
            top = max(_max_abs(layer.weights), _max_abs(layer.bias))
            weight_threshold = bias_threshold = fraction * top
        else:
            weight_threshold = fraction * _max_abs(layer.weights)
            bias_threshold = fraction * _max_abs(layer.bias)
        layers.append(
            layer.with_parameters(
                _prune_tensor(layer.weights, weight_threshold),
                _prune_tensor(layer.bias, bias_threshold),
            )
        )

    pruned = net.with_layers(layers, name=f"{net.name}-mbp{fraction:g}")
    logger.debug(f"Pruned '{net.name}' at fraction {fraction} ({scope.value})")
    return pruned


def quantize_tensor(values: np.ndarray, scheme: QuantScheme) -> np.ndarray:
    """
    Quantize and dequantize one tensor.

    Integer schemes are symmetric per tensor with round-half-to-even; an
    all-zero tensor passes through unchanged.
    """
    values = np.asarray(values, dtype=np.float64)
    if not scheme.kind.is_integer:
        return values.astype(np.float16).astype(np.float64)
    top = float(np.max(np.abs(values))) if values.size else 0.0
    if top == 0.0:
        return values.copy()
    qmax = scheme.qmax
    levels = np.clip(np.rint(values * qmax / top), -qmax, qmax)
    return levels * top / qmax


def quantize(net: Network, scheme: QuantScheme) -> Network:
    """
    Simulated post-training quantization of every weight and bias tensor.

    Returns:
        A float64 network holding the dequantized values, named
        ``<name>-<kind>``
    """
    layers = []
    for layer in net.layers:
        if layer.weights is None:
            layers.append(layer)
            continue
        layers.append(layer.with_parameters(quantize_tensor(layer.weights, scheme), quantize_tensor(layer.bias, scheme)))
    logger.debug(f"Quantized '{net.name}' to {scheme.kind.value}")
    return net.with_layers(layers, name=f"{net.name}-{scheme.kind.value}")


def zero_count(net: Network) -> int:
    """Number of stored weights and biases equal to zero."""
    total = 0
    for layer in net.layers:
        for values in (layer.weights, layer.bias):
            if values is not None:
                total += int(np.count_nonzero(values == 0.0))
    return total


def compaction_summary(original: Network, compact: Network) -> Dict[str, Any]:
    """
    Sparsity and precision summary of a compacted network.

    Returns:
        Parameter and zero counts, sparsity, and the largest absolute change
        per layer and overall
    """
    per_layer = []
    overall_change = 0.0
    for index, (before, after) in enumerate(zip(original.layers, compact.layers), start=1):
        if before.weights is None:
            continue
        change = max(
            float(np.max(np.abs(before.weights - after.weights), initial=0.0)),
            float(np.max(np.abs(before.bias - after.bias), initial=0.0)),
        )
        overall_change = max(overall_change, change)
        zeros = int(np.count_nonzero(after.weights == 0.0) + np.count_nonzero(after.bias == 0.0))
        per_layer.append({
            "layer": index,
            "kind": after.kind.value,
            "parameters": after.parameter_count(),
            "zeros": zeros,
            "max_abs_change": change,
        })

    parameters = compact.parameter_count()
    zeros = zero_count(compact)
    return {
        "network": compact.name,
        "source": original.name,
        "parameters": parameters,
        "zeros": zeros,
        "sparsity": zeros / parameters if parameters else 0.0,
        "max_abs_change": overall_change,
        "layers": per_layer,
    }
