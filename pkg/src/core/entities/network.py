"""
Network entity - an ordered stack of layers producing logits.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

from ..exceptions import ClassIndexError, ShapeError
from .layer import LayerSpec


class Network:
    """
    Immutable feed-forward classifier.

    The last layer produces the logit vector; softmax is never stored and is
    applied on demand by the model service.
    """

    def __init__(self, layers: Sequence[LayerSpec], name: str = "network"):
        """
        Initialize a network.

        Args:
            layers: Layers in evaluation order
            name: Display name, also written to network files

        Raises:
            ShapeError: If the network is empty, adjacent shapes differ or
                the output is not a vector
        """
        if not layers:
            raise ShapeError("Network must have at least one layer")

        for index in range(1, len(layers)):
            previous, current = layers[index - 1], layers[index]
            if previous.output_shape != current.input_shape:
                raise ShapeError(
                    f"Layer {index} expects input {current.input_shape} "
                    f"but layer {index - 1} produces {previous.output_shape}"
                )

        if len(layers[-1].output_shape) != 1:
            raise ShapeError(f"Final layer must output a logit vector, got {layers[-1].output_shape}")

        self._layers: Tuple[LayerSpec, ...] = tuple(layers)
        self.name = name or "network"

    @property
    def layers(self) -> Tuple[LayerSpec, ...]:
        return self._layers

    @property
    def depth(self) -> int:
        return len(self._layers)

    @property
    def input_shape(self) -> Tuple[int, ...]:
        return self._layers[0].input_shape

    @property
    def input_size(self) -> int:
        return self._layers[0].input_size

    @property
    def num_classes(self) -> int:
        return self._layers[-1].output_shape[0]

    def layer_sizes(self) -> List[int]:
        """Flattened sizes of the input and of every layer output."""
        return [self.input_size] + [layer.output_size for layer in self._layers]

    def parameter_count(self) -> int:
        return sum(layer.parameter_count() for layer in self._layers)

    def with_layers(self, layers: Sequence[LayerSpec], name: str | None = None) -> "Network":
        """Return a new network with the same name unless one is given."""
        return Network(layers, name=name or self.name)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Network):
            return False
        return len(self._layers) == len(other._layers) and all(
            mine == theirs for mine, theirs in zip(self._layers, other._layers)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return (
            f"Network(name='{self.name}', layers={len(self._layers)}, "
            f"input={self.input_shape}, classes={self.num_classes})"
        )


@dataclass(frozen=True)
class ClassPair:
    """
    Ordered pair of distinct class indices (0-based).

    Used both for prediction ratios and for the implication pairs
    (correct class, competitor).
    """

    i: int
    j: int

    def __post_init__(self):
        if self.i < 0 or self.j < 0:
            raise ClassIndexError(f"Class indices must be non-negative, got ({self.i}, {self.j})")
        if self.i == self.j:
            raise ClassIndexError(f"Class pair needs two different classes, got ({self.i}, {self.j})")

    def validate_for(self, num_classes: int) -> "ClassPair":
        """
        Check that both indices exist in a network with ``num_classes`` outputs.

        Raises:
            ClassIndexError: If an index is out of range
        """
        if self.i >= num_classes or self.j >= num_classes:
            raise ClassIndexError(
                f"Class pair ({self.i}, {self.j}) out of range for {num_classes} classes"
            )
        return self

    def swapped(self) -> "ClassPair":
        return ClassPair(self.j, self.i)

    def __str__(self) -> str:
        return f"({self.i},{self.j})"
