"""
Relax service - linear relaxations of one or two networks over a region.

Both networks read the same input columns. Affine layers become equality
rows, ReLU neurons are either phase-fixed equalities or the triangle
relaxation, and every max-pool output gets the window inequalities plus
the sum inequality. Variable names follow ``{n1|n2}_l{k}_post_{i}`` with
shared inputs named ``in_{i}``.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..entities.bounds_map import BoundsMap
from ..entities.layer import LayerKind
from ..entities.linear_program import LinearProgram, NetworkRole, ProblemVariant, Relation
from ..entities.network import ClassPair, Network
from ..entities.region import InputRegion
from ..exceptions import ShapeError
from .bounds import phase_masks, region_box
from .model import layer_activations, require_compatible

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RelaxOptions:
    """
    Knobs of the relaxation.

    Attributes:
        pure_margin: Margin standing in for the strict inequality of the
            pure-implication variant
        phase_slack: Widening applied to bounds before phase classification
            and to every layer variable's box
        corrupt_triangle: Fault injection for audit negative controls; drops
            the intercept of every triangle upper row
    """

    pure_margin: float = 1e-6
    phase_slack: float = 1e-9
    corrupt_triangle: bool = False


def _check_bounds(net: Network, bounds: BoundsMap, depth: int) -> None:
    if len(bounds) < depth + 1:
        raise ShapeError(
            f"Bounds for '{net.name}' cover {len(bounds) - 1} layers, need {depth}"
        )
    for index in range(depth + 1):
        expected = net.layer_sizes()[index]
        if bounds.layer(index).post_low.size != expected:
            raise ShapeError(f"Bounds of layer {index} of '{net.name}' have the wrong size")


def _add_input_block(lp: LinearProgram, region: InputRegion, size: int) -> np.ndarray:
    if region.dimension != size:
        raise ShapeError(f"Region dimension {region.dimension} does not match network input size {size}")
    low, high = region_box(region)
    cols = lp.add_variables([f"in_{i}" for i in range(size)], low, high)
    lp.layout[(NetworkRole.SHARED_INPUT, 0)] = cols
    return cols


def encode_network(
    lp: LinearProgram,
    net: Network,
    bounds: BoundsMap,
    role: NetworkRole,
    input_cols: np.ndarray,
    options: RelaxOptions,
    depth: Optional[int] = None,
) -> np.ndarray:
    """
    Append the variables and rows of one network to ``lp``.

    Args:
        lp: Program under construction; must already hold the input block
        net: Network to encode
        bounds: Sound bounds of ``net`` over the region
        role: Owner tag used for naming and the layout table
        input_cols: Columns of the shared input block
        options: Relaxation options
        depth: Encode only the first ``depth`` layers (all by default)

    Returns:
        Columns of the last encoded layer
    """
    depth = net.depth if depth is None else depth
    _check_bounds(net, bounds, depth)
    slack = options.phase_slack
    tag = role.value
    previous = input_cols

    for k in range(1, depth + 1):
        layer = net.layers[k - 1]
        layer_bounds = bounds.layer(k)
        prev_low = bounds.layer(k - 1).post_low - slack

        names = [f"{tag}_l{k}_post_{i}" for i in range(layer.output_size)]
        cols = lp.add_variables(names, layer_bounds.post_low - slack, layer_bounds.post_high + slack)
        lp.layout[(role, k)] = cols
        lp.activation_layers[(role, k)] = layer.is_activation

        if layer.is_affine:
            matrix, bias = layer.as_affine()
            for i in range(layer.output_size):
                start, end = matrix.indptr[i], matrix.indptr[i + 1]
                lp.add_constraint(
                    np.concatenate([[cols[i]], previous[matrix.indices[start:end]]]),
                    np.concatenate([[1.0], -matrix.data[start:end]]),
                    Relation.EQ,
                    bias[i],
                    name=f"{tag}_l{k}_aff_{i}",
                )

        elif layer.kind == LayerKind.RELU:
            _encode_relu(lp, layer_bounds.pre_low, layer_bounds.pre_high, previous, cols, f"{tag}_l{k}", options)

        else:
            windows = layer.pool_windows()
            for i, window in enumerate(windows):
                inputs = previous[window]
                for j, col in enumerate(inputs):
                    lp.add_constraint([col, cols[i]], [1.0, -1.0], Relation.LE, 0.0, name=f"{tag}_l{k}_pool_{i}_ge{j}")
                lows = prev_low[window]
                lp.add_constraint(
                    np.concatenate([[cols[i]], inputs]),
                    np.concatenate([[1.0], -np.ones(inputs.size)]),
                    Relation.LE,
                    float(lows.max() - lows.sum()),
                    name=f"{tag}_l{k}_pool_{i}_sum",
                )

        previous = cols

    return previous


def _encode_relu(
    lp: LinearProgram,
    pre_low: np.ndarray,
    pre_high: np.ndarray,
    pre_cols: np.ndarray,
    post_cols: np.ndarray,
    prefix: str,
    options: RelaxOptions,
) -> None:
    slack = options.phase_slack
    active, inactive, _ = phase_masks(pre_low, pre_high, slack)
    for i, (pre, post) in enumerate(zip(pre_cols, post_cols)):
        if active[i]:
            lp.add_constraint([post, pre], [1.0, -1.0], Relation.EQ, 0.0, name=f"{prefix}_relu_{i}_act")
            continue
        if inactive[i]:
            lp.add_constraint([post], [1.0], Relation.EQ, 0.0, name=f"{prefix}_relu_{i}_off")
            continue
        low = pre_low[i] - slack
        high = pre_high[i] + slack
        slope = high / (high - low)
        intercept = 0.0 if options.corrupt_triangle else -high * low / (high - low)
        # post <= slope * (pre - low)
        lp.add_constraint([post, pre], [1.0, -slope], Relation.LE, intercept, name=f"{prefix}_relu_{i}_up")
        lp.add_constraint([pre, post], [1.0, -1.0], Relation.LE, 0.0, name=f"{prefix}_relu_{i}_id")
        lp.add_constraint([post], [-1.0], Relation.LE, 0.0, name=f"{prefix}_relu_{i}_nn")


def _margin_terms(cols: np.ndarray, pair: ClassPair, sign: float) -> Tuple[List[int], List[float]]:
    return [int(cols[pair.i]), int(cols[pair.j])], [sign, -sign]


def build_joint_lp(
    net1: Network,
    net2: Network,
    region: InputRegion,
    pair: ClassPair,
    bounds1: BoundsMap,
    bounds2: BoundsMap,
    variant: ProblemVariant = ProblemVariant.JOINT_MARGIN,
    options: Optional[RelaxOptions] = None,
) -> LinearProgram:
    """
    Build the relaxed program whose minimum bounds ln RPR of net1 w.r.t. net2.

    Args:
        net1: Network whose margin is minimized
        net2: Reference network
        region: Input region shared by both networks
        pair: Class pair (i, j)
        bounds1: Bounds of net1 over ``region``
        bounds2: Bounds of net2 over ``region``
        variant: Objective and network blocks to emit
        options: Relaxation options

    Returns:
        A LinearProgram in minimize form

    Raises:
        CompatibilityError: If the networks are not compatible
        ClassIndexError: If the pair does not fit the networks
        ShapeError: If the bounds do not match the networks
    """
    options = options or RelaxOptions()
    require_compatible(net1, net2)
    pair.validate_for(net1.num_classes)

    lp = LinearProgram(name=f"{variant.value}_{net1.name}_{net2.name}_{pair.i}_{pair.j}")
    lp.variant = variant
    input_cols = _add_input_block(lp, region, net1.input_size)

    logits1 = logits2 = None
    if variant != ProblemVariant.INDEPENDENT_NET2:
        logits1 = encode_network(lp, net1, bounds1, NetworkRole.NET1, input_cols, options)
    if variant != ProblemVariant.INDEPENDENT_NET1:
        logits2 = encode_network(lp, net2, bounds2, NetworkRole.NET2, input_cols, options)

    cols: List[int] = []
    coefs: List[float] = []
    if logits1 is not None:
        c, v = _margin_terms(logits1, pair, 1.0)
        cols += c
        coefs += v
    if variant in (ProblemVariant.JOINT_MARGIN, ProblemVariant.INDEPENDENT_NET2):
        c, v = _margin_terms(logits2, pair, -1.0)
        cols += c
        coefs += v
    if variant == ProblemVariant.JOINT_PURE_IMPLICATION:
        c, v = _margin_terms(logits2, pair, -1.0)
        lp.add_constraint(c, v, Relation.LE, -options.pure_margin, name="pure_margin")
    lp.set_objective(cols, coefs)

    logger.debug(f"Built {lp!r} for pair {pair}")
    return lp


def build_network_lp(
    net: Network,
    region: InputRegion,
    bounds: BoundsMap,
    objective: Optional[np.ndarray] = None,
    options: Optional[RelaxOptions] = None,
    depth: Optional[int] = None,
) -> LinearProgram:
    """
    Relaxation of a single network, encoded under the ``n1`` role.

    Args:
        net: Network to encode
        region: Input region
        bounds: Bounds of ``net`` over ``region``
        objective: Optional coefficients over the last encoded layer
        options: Relaxation options
        depth: Encode only the first ``depth`` layers

    Returns:
        A LinearProgram; the objective is zero unless ``objective`` is given
    """
    options = options or RelaxOptions()
    lp = LinearProgram(name=f"single_{net.name}")
    input_cols = _add_input_block(lp, region, net.input_size)
    last = encode_network(lp, net, bounds, NetworkRole.NET1, input_cols, options, depth=depth)
    if objective is not None:
        objective = np.asarray(objective, dtype=np.float64)
        if objective.shape != last.shape:
            raise ShapeError(f"Objective has {objective.size} coefficients, last layer has {last.size} neurons")
        lp.set_objective(last, objective)
    return lp


def execution_point(lp: LinearProgram, net1: Network, net2: Optional[Network], values) -> np.ndarray:
    """
    Primal vector holding the true layer values of the networks at ``values``.

    Blocks absent from ``lp`` are skipped, so single-network and independent
    programs work too.
    """
    point = np.zeros(lp.num_vars)
    traces: Dict[NetworkRole, List[np.ndarray]] = {}
    for role, net in ((NetworkRole.NET1, net1), (NetworkRole.NET2, net2)):
        if net is not None:
            traces[role] = layer_activations(net, values)

    for (role, layer), cols in lp.layout.items():
        if role == NetworkRole.SHARED_INPUT:
            point[cols] = np.asarray(values, dtype=np.float64).ravel()
        elif role in traces:
            point[cols] = traces[role][layer]
    return point
