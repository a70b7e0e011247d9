"""
Bounds service - sound interval bounds for every neuron over an input region.

Affine layers use the sign-split interval product, ReLU clamps at zero and
max pooling takes the window maxima of the lower and upper bounds.
"""

import logging
from typing import List, Tuple

import numpy as np

from ..entities.bounds_map import BoundsMap, LayerBounds, NeuronPhase
from ..entities.layer import LayerKind, LayerSpec
from ..entities.network import Network
from ..entities.region import InputRegion
from ..exceptions import RegionError, ShapeError

logger = logging.getLogger(__name__)


def region_box(region: InputRegion) -> Tuple[np.ndarray, np.ndarray]:
    """
    The region as a box, clipped to the input domain when one is given.

    Returns:
        (low, high) vectors with low <= high

    Raises:
        RegionError: If clipping leaves an empty box
    """
    low = region.center - region.delta
    high = region.center + region.delta
    if region.has_domain:
        low = np.maximum(low, region.domain_low)
        high = np.minimum(high, region.domain_high)
    if np.any(low > high):
        raise RegionError("Input region is empty after clipping to the domain")
    return low, high


def propagate_layer(layer: LayerSpec, previous: LayerBounds) -> LayerBounds:
    """Bounds of one layer's values given the bounds of its input."""
    low, high = previous.post_low, previous.post_high

    if layer.is_affine:
        matrix, bias = layer.as_affine()
        positive = matrix.maximum(0)
        negative = matrix.minimum(0)
        return LayerBounds.of(
            positive @ low + negative @ high + bias,
            positive @ high + negative @ low + bias,
        )

    if layer.kind == LayerKind.RELU:
        return LayerBounds(low.copy(), high.copy(), np.maximum(low, 0.0), np.maximum(high, 0.0))

    windows = layer.pool_windows()
    return LayerBounds(low.copy(), high.copy(), low[windows].max(axis=1), high[windows].max(axis=1))


def propagate_from(net: Network, layers: List[LayerBounds], start: int) -> List[LayerBounds]:
    """Re-propagate layers ``start + 1 .. N`` from the bounds at index ``start``."""
    result = list(layers[: start + 1])
    for index in range(start + 1, net.depth + 1):
        result.append(propagate_layer(net.layers[index - 1], result[-1]))
    return result


def propagate_intervals(net: Network, region: InputRegion) -> BoundsMap:
    """
    Interval bound propagation of the region box through the network.

    Raises:
        ShapeError: If the region dimension differs from the network input
        RegionError: If the region is empty
    """
    if region.dimension != net.input_size:
        raise ShapeError(
            f"Region dimension {region.dimension} does not match network input size {net.input_size}"
        )
    low, high = region_box(region)
    layers = propagate_from(net, [LayerBounds.of(low, high)], 0)
    logger.debug(f"Propagated intervals through '{net.name}' (delta={region.delta})")
    return BoundsMap(layers, method="interval")


def phase_masks(pre_low: np.ndarray, pre_high: np.ndarray, slack: float = 1e-9):
    """
    Active, inactive and unstable masks after widening the bounds by ``slack``.

    A zero-width interval is always phase-fixed; the active test wins on zero.
    """
    fixed = pre_high <= pre_low
    low = np.where(fixed, pre_low, pre_low - slack)
    high = np.where(fixed, pre_high, pre_high + slack)
    active = low >= 0.0
    inactive = ~active & (high <= 0.0)
    unstable = ~(active | inactive)
    return active, inactive, unstable


def classify_phases(bounds: LayerBounds, slack: float = 1e-9) -> List[NeuronPhase]:
    """Phase of every neuron of a ReLU layer."""
    active, inactive, _ = phase_masks(bounds.pre_low, bounds.pre_high, slack)
    phases = []
    for is_active, is_inactive in zip(active, inactive):
        if is_active:
            phases.append(NeuronPhase.ACTIVE)
        elif is_inactive:
            phases.append(NeuronPhase.INACTIVE)
        else:
            phases.append(NeuronPhase.UNSTABLE)
    return phases


def count_unstable(net: Network, bounds: BoundsMap, slack: float = 1e-9) -> int:
    """Number of unstable ReLU neurons in the network."""
    total = 0
    for index, layer in enumerate(net.layers, start=1):
        if layer.kind == LayerKind.RELU:
            layer_bounds = bounds.layer(index)
            total += int(phase_masks(layer_bounds.pre_low, layer_bounds.pre_high, slack)[2].sum())
    return total
