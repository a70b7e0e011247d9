"""
Bound refinement - tighten interval bounds with LPs over preceding layers.
"""

import logging
from typing import Optional

import numpy as np

from ..entities.bounds_map import BoundsMap, LayerBounds
from ..entities.layer import LayerKind
from ..entities.linear_program import NetworkRole
from ..entities.network import Network
from ..entities.region import InputRegion
from ..interfaces.lp_solver import LpSolverInterface
from .bounds import phase_masks, propagate_from
from .relax import RelaxOptions, build_network_lp

logger = logging.getLogger(__name__)


class BoundRefiner:
    """
    Re-solves the pre-activation bounds of unstable ReLU neurons.

    For each ReLU layer, the preceding layers are encoded with the current
    (already refined) bounds and every unstable neuron's value is minimized
    and maximized. Results are intersected with the coarse bounds, so the
    output is always contained in the input. Later layers are re-propagated
    with interval arithmetic after each refined layer.
    """

    def __init__(self, solver: LpSolverInterface, options: Optional[RelaxOptions] = None):
        """
        Initialize the refiner.

        Args:
            solver: LP solver used for the per-neuron programs
            options: Relaxation options for the encoded prefix
        """
        self._solver = solver
        self._options = options or RelaxOptions()

    def refine(self, net: Network, region: InputRegion, coarse: BoundsMap) -> BoundsMap:
        """
        Refine ``coarse`` layer by layer.

        Returns:
            A BoundsMap elementwise contained in ``coarse``; neurons whose
            programs fail keep their coarse bounds and are listed in
            ``diagnostics``
        """
        layers = list(coarse.layers)
        diagnostics = list(coarse.diagnostics)

        for k, layer in enumerate(net.layers, start=1):
            if layer.kind != LayerKind.RELU:
                continue
            source = k - 1
            # an affine image of a box is already tight
            if not any(upstream.is_activation for upstream in net.layers[:source]):
                continue

            pre = layers[k]
            _, _, unstable = phase_masks(pre.pre_low, pre.pre_high, self._options.phase_slack)
            if not unstable.any():
                continue

            current = BoundsMap(layers, method="lp")
            lp = build_network_lp(net, region, current, options=self._options, depth=source)
            cols = lp.layout[(NetworkRole.NET1, source)]
            low = layers[source].post_low.copy()
            high = layers[source].post_high.copy()

            for neuron in np.flatnonzero(unstable):
                col = int(cols[neuron])
                for sign in (1.0, -1.0):
                    lp.set_objective([col], [sign])
                    solution = self._solver.solve(lp)
                    if not solution.is_optimal:
                        message = (
                            f"layer {source} neuron {neuron}: {solution.status.value} while "
                            f"{'minimizing' if sign > 0 else 'maximizing'}, kept interval bound"
                        )
                        diagnostics.append(message)
                        logger.warning(f"Bound refinement fallback for '{net.name}', {message}")
                        continue
                    if sign > 0:
                        low[neuron] = max(low[neuron], solution.objective)
                    else:
                        high[neuron] = min(high[neuron], -solution.objective)

            inverted = low > high
            low[inverted] = high[inverted]
            old = layers[source]
            if net.layers[source - 1].is_activation:
                layers[source] = LayerBounds(old.pre_low.copy(), old.pre_high.copy(), low, high)
            else:
                layers[source] = LayerBounds.of(low, high)
            refined = propagate_from(net, layers, source)
            layers = [_intersect(old, new) for old, new in zip(coarse.layers, refined)]

        logger.debug(f"Refined bounds of '{net.name}' ({len(diagnostics)} fallbacks)")
        return BoundsMap(layers, method="lp", diagnostics=diagnostics)


def _intersect(coarse: LayerBounds, fine: LayerBounds) -> LayerBounds:
    def clip(c_low, c_high, f_low, f_high):
        low = np.maximum(c_low, f_low)
        high = np.minimum(c_high, f_high)
        inverted = low > high
        low[inverted] = high[inverted]
        return low, high

    pre_low, pre_high = clip(coarse.pre_low, coarse.pre_high, fine.pre_low, fine.pre_high)
    post_low, post_high = clip(coarse.post_low, coarse.post_high, fine.post_low, fine.post_high)
    return LayerBounds(pre_low, pre_high, post_low, post_high)
