"""
BoundsMap entity - per-neuron interval bounds of one network over a region.

Index 0 holds the clipped input box. Index k (1..N) holds the bounds of
layer k: ``pre`` bounds its input for activation layers (ReLU, MaxPool2D)
and equals ``post`` for affine layers.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Sequence

import numpy as np

from ..exceptions import ShapeError


class NeuronPhase(Enum):
    """Phase of a ReLU neuron, decided by its pre-activation bounds."""
    ACTIVE = "active"
    INACTIVE = "inactive"
    UNSTABLE = "unstable"


@dataclass(frozen=True, eq=False)
class LayerBounds:
    """Pre- and post-activation bounds of one layer."""

    pre_low: np.ndarray
    pre_high: np.ndarray
    post_low: np.ndarray
    post_high: np.ndarray

    def __post_init__(self):
        for name in ("pre_low", "pre_high", "post_low", "post_high"):
            getattr(self, name).setflags(write=False)
        if self.pre_low.shape != self.pre_high.shape or self.post_low.shape != self.post_high.shape:
            raise ShapeError("Lower and upper bounds must have the same shape")
        if np.any(self.pre_low > self.pre_high) or np.any(self.post_low > self.post_high):
            raise ShapeError("Lower bound exceeds upper bound")

    @classmethod
    def of(cls, low: np.ndarray, high: np.ndarray) -> "LayerBounds":
        """Bounds for a layer whose pre and post values coincide."""
        low = np.array(low, dtype=np.float64)
        high = np.array(high, dtype=np.float64)
        return cls(low, high, low.copy(), high.copy())

    def contains(self, other: "LayerBounds", tol: float = 0.0) -> bool:
        """True if ``other`` lies inside these bounds (up to ``tol``)."""
        return bool(
            np.all(other.pre_low >= self.pre_low - tol)
            and np.all(other.pre_high <= self.pre_high + tol)
            and np.all(other.post_low >= self.post_low - tol)
            and np.all(other.post_high <= self.post_high + tol)
        )


@dataclass(frozen=True, eq=False)
class BoundsMap:
    """Bounds for every layer of one network, plus refinement diagnostics."""

    layers: Sequence[LayerBounds]
    method: str = "interval"
    diagnostics: List[str] = field(default_factory=list)

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))

    def __len__(self) -> int:
        return len(self.layers)

    def layer(self, index: int) -> LayerBounds:
        return self.layers[index]

    @property
    def input_bounds(self) -> LayerBounds:
        return self.layers[0]

    @property
    def output_bounds(self) -> LayerBounds:
        return self.layers[-1]

    def contains(self, other: "BoundsMap", tol: float = 0.0) -> bool:
        """Elementwise containment of every layer of ``other``."""
        if len(other) != len(self):
            return False
        return all(mine.contains(theirs, tol) for mine, theirs in zip(self.layers, other.layers))

    def total_width(self) -> float:
        """Sum of post-activation interval widths, a coarse precision measure."""
        return float(sum(np.sum(b.post_high - b.post_low) for b in self.layers))
