"""
Oracle service - brute-force reference computations and scenario networks.

Sampling uses numpy's PCG64 generator seeded explicitly, with a Latin
hypercube over the region box plus its center and, in low dimension, every
box corner. Results are deterministic for a given seed.
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import qmc

from ..entities.layer import LayerSpec
from ..entities.linear_program import LinearProgram
from ..entities.network import ClassPair, Network
from ..entities.region import InputRegion
from ..entities.verification import SampleOracleResult
from ..exceptions import ShapeError
from .bounds import region_box
from .model import forward_batch, log_rpr_batch, predict, require_compatible
from .relax import execution_point

logger = logging.getLogger(__name__)

MAX_CORNER_DIM = 12
MAX_GRID_DIM = 4
BATCH = 4096


def generator(seed: int) -> np.random.Generator:
    """The documented PRNG: numpy PCG64 seeded with ``seed``."""
    return np.random.Generator(np.random.PCG64(seed))


def region_samples(region: InputRegion, n: int, seed: int, include_corners: bool = True) -> np.ndarray:
    """
    Deterministic points of the region box.

    Returns:
        Array (count, dim): the center, ``n`` Latin-hypercube points and,
        when ``include_corners`` and dim <= 12, all 2^dim corners

    Raises:
        ValueError: If ``n`` < 1
    """
    if n < 1:
        raise ValueError(f"Need at least one sample, got {n}")
    low, high = region_box(region)
    width = high - low
    dim = low.size
    unit = qmc.LatinHypercube(d=dim, seed=generator(seed)).random(n)
    parts = [region.center[None, :], low + unit * width]
    if include_corners and dim <= MAX_CORNER_DIM:
        bits = np.array(list(itertools.product((0.0, 1.0), repeat=dim)))
        parts.append(low + bits * width)
    return np.vstack(parts)


def _extrema(net1: Network, net2: Network, points: np.ndarray, pair: ClassPair, seed: int) -> SampleOracleResult:
    values = np.concatenate([
        log_rpr_batch(net1, net2, points[start:start + BATCH], pair)
        for start in range(0, points.shape[0], BATCH)
    ])
    low, high = int(np.argmin(values)), int(np.argmax(values))
    return SampleOracleResult(
        sampled_min=float(values[low]),
        sampled_max=float(values[high]),
        argmin=points[low].copy(),
        argmax=points[high].copy(),
        num_samples=int(values.size),
        seed=seed,
    )


def sample_extrema(
    net1: Network, net2: Network, region: InputRegion, pair: ClassPair, n: int = 10000, seed: int = 0
) -> SampleOracleResult:
    """
    Sampled minimum and maximum of ln RPR over the region.

    Raises:
        CompatibilityError: If the networks are not compatible
        ValueError: If ``n`` < 1
    """
    require_compatible(net1, net2)
    return _extrema(net1, net2, region_samples(region, n, seed), pair, seed)


def grid_extrema(
    net1: Network, net2: Network, region: InputRegion, pair: ClassPair, points_per_dim: int = 101
) -> SampleOracleResult:
    """
    Exhaustive grid evaluation of ln RPR; degenerate box axes get one point.

    Raises:
        ShapeError: If the input dimension exceeds 4
    """
    require_compatible(net1, net2)
    low, high = region_box(region)
    if low.size > MAX_GRID_DIM:
        raise ShapeError(
            f"Grid oracle supports at most {MAX_GRID_DIM} input dimensions, got {low.size}; use sample_extrema"
        )
    axes = [np.linspace(lo, hi, points_per_dim) if hi > lo else np.array([lo]) for lo, hi in zip(low, high)]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([axis.ravel() for axis in mesh], axis=1)
    return _extrema(net1, net2, points, pair, seed=0)


def relaxation_violation(
    lp: LinearProgram, net1: Network, net2: Optional[Network], points: np.ndarray
) -> Tuple[float, Optional[np.ndarray]]:
    """
    Largest constraint violation of true executions at ``points``.

    Returns:
        (worst violation, the point attaining it or None when zero)
    """
    worst, worst_point = 0.0, None
    for point in points:
        violation = lp.max_violation(execution_point(lp, net1, net2, point))
        if violation > worst:
            worst, worst_point = violation, point
    return worst, worst_point


def decision_counterexamples(net1: Network, net2: Network, points: np.ndarray, label: int) -> int:
    """Number of points where net2 predicts ``label`` but net1 does not."""
    require_compatible(net1, net2)
    count = 0
    for start in range(0, points.shape[0], BATCH):
        chunk = points[start:start + BATCH]
        right2 = np.argmax(forward_batch(net2, chunk), axis=1) == label
        right1 = np.argmax(forward_batch(net1, chunk), axis=1) == label
        count += int(np.count_nonzero(right2 & ~right1))
    return count


def robustness_violation(net: Network, region: InputRegion, label: int, n: int = 10000, seed: int = 0) -> Optional[np.ndarray]:
    """A sampled input of the region that ``net`` does not classify as ``label``, if any."""
    points = region_samples(region, n, seed)
    for start in range(0, points.shape[0], BATCH):
        chunk = points[start:start + BATCH]
        wrong = np.flatnonzero(np.argmax(forward_batch(net, chunk), axis=1) != label)
        if wrong.size:
            return chunk[wrong[0]].copy()
    return None


# Scenario networks

class FixtureKind(Enum):
    DEMO_PAIR = "demo"
    RANDOM_SMALL = "random"
    UNIFORM_CONSTANT = "uniform"


@dataclass(frozen=True, eq=False)
class Fixture:
    """
    Networks plus a sample region to run them on.

    For DEMO_PAIR the first network is the implied one and the second
    the implier.
    """

    kind: FixtureKind
    networks: Tuple[Network, ...]
    center: np.ndarray
    delta: float
    label: int
    seed: int

    @property
    def region(self) -> InputRegion:
        return InputRegion(self.center, self.delta)


def uniform_constant_network(input_dim: int, num_classes: int, name: str = "uniform") -> Network:
    """A single zero Dense layer: every logit is 0, softmax is uniform."""
    return Network([LayerSpec.dense(np.zeros((num_classes, input_dim)), np.zeros(num_classes))], name=name)


def demo_networks() -> Tuple[Network, Network]:
    """
    Two 2-input, 2-class networks where the first is correct wherever the
    second is, on the box [0.2, 0.8]^2, while the second misclassifies near
    the low corner.

    The relative log-ratio is relu(x1 - 0.5) + 0.2, never below 0.2.
    """
    implied = Network(
        [
            LayerSpec.dense([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [-0.5, 0.0, 0.0]),
            LayerSpec.relu((3,)),
            LayerSpec.dense([[1.0, 1.0, 0.1], [0.0, 0.0, 0.0]], [-0.2, 0.0]),
        ],
        name="demo-implied",
    )
    implier = Network(
        [
            LayerSpec.dense([[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0]),
            LayerSpec.relu((2,)),
            LayerSpec.dense([[1.0, 0.1], [0.0, 0.0]], [-0.4, 0.0]),
        ],
        name="demo-implier",
    )
    return implied, implier


def random_network(
    rng: np.random.Generator, input_dim: int, num_classes: int, widths: Sequence[int], name: str
) -> Network:
    """Dense/ReLU stack with the given hidden widths and scaled normal weights."""
    layers: List[LayerSpec] = []
    fan_in = input_dim
    for width in list(widths) + [num_classes]:
        weights = rng.normal(0.0, 1.0 / np.sqrt(fan_in), size=(width, fan_in))
        bias = rng.normal(0.0, 0.1, size=width)
        if layers:
            layers.append(LayerSpec.relu((fan_in,)))
        layers.append(LayerSpec.dense(weights, bias))
        fan_in = width
    return Network(layers, name=name)


def perturb_network(rng: np.random.Generator, net: Network, scale: float, name: str) -> Network:
    """Copy of ``net`` with relative Gaussian noise on every weight and bias."""
    layers = []
    for layer in net.layers:
        if layer.weights is None:
            layers.append(layer)
            continue
        weights = layer.weights + scale * rng.normal(size=layer.weights.shape) * (np.abs(layer.weights) + 0.05)
        bias = layer.bias + scale * rng.normal(size=layer.bias.shape) * (np.abs(layer.bias) + 0.05)
        layers.append(layer.with_parameters(weights, bias))
    return net.with_layers(layers, name=name)


def make_fixture(
    kind: FixtureKind,
    seed: int = 0,
    input_dim: Optional[int] = None,
    num_classes: Optional[int] = None,
    count: int = 2,
    delta: float = 0.05,
) -> Fixture:
    """
    Build a seeded scenario.

    Args:
        kind: Scenario kind
        seed: PRNG seed; the same seed gives bit-identical networks
        input_dim: Input size for random kinds (2-4 drawn when omitted)
        num_classes: Class count for random kinds (2-3 drawn when omitted)
        count: Number of networks for RANDOM_SMALL (2 for pairs, 3 for chains)
        delta: Region radius for random kinds

    Returns:
        Fixture with the networks, a center, radius and the first network's
        predicted label at the center
    """
    if kind == FixtureKind.DEMO_PAIR:
        implied, implier = demo_networks()
        return Fixture(kind, (implied, implier), np.array([0.5, 0.5]), 0.3, 0, seed)

    rng = generator(seed)
    input_dim = input_dim or int(rng.integers(2, 5))
    num_classes = num_classes or int(rng.integers(2, 4))
    hidden = int(rng.integers(1, 3))
    widths = [int(w) for w in rng.integers(2, 9, size=hidden)]
    base = random_network(rng, input_dim, num_classes, widths, name=f"random{seed}-1")
    center = rng.uniform(0.0, 1.0, size=input_dim)

    if kind == FixtureKind.UNIFORM_CONSTANT:
        networks: Tuple[Network, ...] = (base, uniform_constant_network(input_dim, num_classes))
    else:
        networks = (base,)
        for index in range(2, max(count, 1) + 1):
            networks += (perturb_network(rng, networks[-1], 0.15, name=f"random{seed}-{index}"),)

    label = predict(base, center)
    logger.debug(f"Built {kind.value} fixture (seed={seed}, dim={input_dim}, classes={num_classes})")
    return Fixture(kind, networks, center, float(delta), label, seed)
