"""
LayerSpec entity - one layer of a feed-forward classifier.

Tensors are channels-last: images are (H, W, C), vectors are (n,).
Conv2D kernels are (kh, kw, c_in, c_out). One-dimensional signals are
represented as (L, 1, C) with (k, 1) kernels.
"""

from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sps

from ..exceptions import NumericError, ShapeError


class LayerKind(Enum):
    """Supported layer kinds."""
    DENSE = "dense"
    CONV2D = "conv2d"
    MAX_POOL2D = "max_pool2d"
    ZERO_PAD2D = "zero_pad2d"
    FLATTEN = "flatten"
    RELU = "relu"


AFFINE_KINDS = frozenset({LayerKind.DENSE, LayerKind.CONV2D, LayerKind.ZERO_PAD2D, LayerKind.FLATTEN})
ACTIVATION_KINDS = frozenset({LayerKind.RELU, LayerKind.MAX_POOL2D})


def _frozen_array(values, name: str) -> np.ndarray:
    array = np.array(values, dtype=np.float64, copy=True)
    if not np.all(np.isfinite(array)):
        raise NumericError(f"{name} contains non-finite values")
    array.setflags(write=False)
    return array


class LayerSpec:
    """
    A single immutable network layer.

    Use the named constructors (``dense``, ``conv2d``, ...) rather than
    calling ``__init__`` directly. The output shape is derived from the
    input shape and the layer parameters.
    """

    def __init__(
        self,
        kind: LayerKind,
        input_shape: Sequence[int],
        weights: Optional[np.ndarray] = None,
        bias: Optional[np.ndarray] = None,
        pool_size: Optional[int] = None,
        padding: Optional[Sequence[int]] = None,
        stride: Optional[Sequence[int]] = None,
    ):
        """
        Initialize and validate a layer.

        Args:
            kind: The layer kind
            input_shape: Shape of one input tensor (no batch axis)
            weights: Dense matrix (n_out, n_in) or conv kernel (kh, kw, c_in, c_out)
            bias: Bias vector (Dense and Conv2D only)
            pool_size: Window size p for MaxPool2D
            padding: (top, bottom, left, right) for ZeroPad2D
            stride: (sh, sw) for Conv2D and MaxPool2D

        Raises:
            ShapeError: If shapes are inconsistent
            NumericError: If weights or bias are not finite
        """
        self.kind = kind
        self.input_shape: Tuple[int, ...] = tuple(int(d) for d in input_shape)
        if not self.input_shape or any(d <= 0 for d in self.input_shape):
            raise ShapeError(f"{kind.value}: input shape must be non-empty and positive, got {self.input_shape}")

        self.weights = _frozen_array(weights, f"{kind.value} weights") if weights is not None else None
        self.bias = _frozen_array(bias, f"{kind.value} bias") if bias is not None else None
        self.pool_size = int(pool_size) if pool_size is not None else None
        self.padding = tuple(int(p) for p in padding) if padding is not None else None
        self.stride = tuple(int(s) for s in stride) if stride is not None else None

        self.output_shape: Tuple[int, ...] = self._validate_and_infer_output()
        self._affine = None
        self._windows = None

    # Named constructors

    @classmethod
    def dense(cls, weights, bias) -> "LayerSpec":
        """Create a fully-connected layer from a (n_out, n_in) matrix."""
        weights = np.asarray(weights, dtype=np.float64)
        if weights.ndim != 2:
            raise ShapeError(f"dense weights must be 2-D, got shape {weights.shape}")
        return cls(LayerKind.DENSE, (weights.shape[1],), weights=weights, bias=bias)

    @classmethod
    def conv2d(cls, input_shape, kernel, bias, stride=(1, 1)) -> "LayerSpec":
        """Create a valid (unpadded) 2-D convolution."""
        return cls(LayerKind.CONV2D, input_shape, weights=kernel, bias=bias, stride=stride)

    @classmethod
    def max_pool2d(cls, input_shape, pool_size: int, stride=None) -> "LayerSpec":
        """Create a max-pooling layer; the stride defaults to the pool size."""
        stride = stride if stride is not None else (pool_size, pool_size)
        return cls(LayerKind.MAX_POOL2D, input_shape, pool_size=pool_size, stride=stride)

    @classmethod
    def zero_pad2d(cls, input_shape, padding) -> "LayerSpec":
        """Create a zero-padding layer with (top, bottom, left, right) padding."""
        return cls(LayerKind.ZERO_PAD2D, input_shape, padding=padding)

    @classmethod
    def flatten(cls, input_shape) -> "LayerSpec":
        """Create a row-major flatten layer."""
        return cls(LayerKind.FLATTEN, input_shape)

    @classmethod
    def relu(cls, input_shape) -> "LayerSpec":
        """Create an elementwise ReLU layer."""
        return cls(LayerKind.RELU, input_shape)

    # Shape logic

    def _validate_and_infer_output(self) -> Tuple[int, ...]:
        kind = self.kind
        if kind == LayerKind.DENSE:
            if self.weights is None or self.bias is None:
                raise ShapeError("dense layer requires weights and bias")
            if len(self.input_shape) != 1:
                raise ShapeError(f"dense input must be a vector, got {self.input_shape}")
            if self.weights.ndim != 2 or self.weights.shape[1] != self.input_shape[0]:
                raise ShapeError(
                    f"dense weights shape {self.weights.shape} does not match input {self.input_shape}"
                )
            if self.bias.shape != (self.weights.shape[0],):
                raise ShapeError(
                    f"dense bias length {self.bias.size} does not match {self.weights.shape[0]} rows"
                )
            return (self.weights.shape[0],)

        if kind == LayerKind.RELU:
            self._require_no_parameters()
            return self.input_shape

        if kind == LayerKind.FLATTEN:
            self._require_no_parameters()
            return (int(np.prod(self.input_shape)),)

        if len(self.input_shape) != 3:
            raise ShapeError(f"{kind.value} expects an (H, W, C) input, got {self.input_shape}")
        height, width, channels = self.input_shape

        if kind == LayerKind.ZERO_PAD2D:
            if self.padding is None or len(self.padding) != 4 or min(self.padding) < 0:
                raise ShapeError(f"zero padding needs 4 non-negative integers, got {self.padding}")
            top, bottom, left, right = self.padding
            return (height + top + bottom, width + left + right, channels)

        default_stride = (self.pool_size, self.pool_size) if kind == LayerKind.MAX_POOL2D and self.pool_size else (1, 1)
        stride = self.stride or default_stride
        if len(stride) != 2 or min(stride) <= 0:
            raise ShapeError(f"{kind.value} stride must be two positive integers, got {stride}")
        self.stride = tuple(stride)

        if kind == LayerKind.CONV2D:
            if self.weights is None or self.bias is None or self.weights.ndim != 4:
                raise ShapeError("conv2d requires a 4-D kernel and a bias")
            kh, kw, c_in, c_out = self.weights.shape
            if c_in != channels:
                raise ShapeError(f"conv2d kernel expects {c_in} channels, input has {channels}")
            if self.bias.shape != (c_out,):
                raise ShapeError(f"conv2d bias length {self.bias.size} does not match {c_out} filters")
            window = (kh, kw)
            out_channels = c_out
        else:
            if self.pool_size is None or self.pool_size <= 0:
                raise ShapeError(f"max pooling needs a positive pool size, got {self.pool_size}")
            window = (self.pool_size, self.pool_size)
            out_channels = channels

        if window[0] > height or window[1] > width:
            raise ShapeError(f"{kind.value} window {window} larger than input {self.input_shape}")
        out_h = (height - window[0]) // stride[0] + 1
        out_w = (width - window[1]) // stride[1] + 1
        return (out_h, out_w, out_channels)

    def _require_no_parameters(self) -> None:
        if self.weights is not None or self.bias is not None:
            raise ShapeError(f"{self.kind.value} layer carries no parameters")

    # Derived views

    @property
    def input_size(self) -> int:
        return int(np.prod(self.input_shape))

    @property
    def output_size(self) -> int:
        return int(np.prod(self.output_shape))

    @property
    def is_affine(self) -> bool:
        return self.kind in AFFINE_KINDS

    @property
    def is_activation(self) -> bool:
        return self.kind in ACTIVATION_KINDS

    def parameter_count(self) -> int:
        """Number of stored weights and biases."""
        total = 0
        if self.weights is not None:
            total += self.weights.size
        if self.bias is not None:
            total += self.bias.size
        return total

    def with_parameters(self, weights: Optional[np.ndarray], bias: Optional[np.ndarray]) -> "LayerSpec":
        """Return a copy of this layer with replaced weights and bias."""
        return LayerSpec(
            self.kind,
            self.input_shape,
            weights=weights,
            bias=bias,
            pool_size=self.pool_size,
            padding=self.padding,
            stride=self.stride,
        )

    def as_affine(self) -> Tuple[sps.csr_matrix, np.ndarray]:
        """
        Lower an affine layer to ``out = A @ in + b`` over flattened tensors.

        Returns:
            Sparse matrix A of shape (output_size, input_size) and bias b

        Raises:
            ShapeError: If the layer is not affine
        """
        if not self.is_affine:
            raise ShapeError(f"{self.kind.value} layer is not affine")
        if self._affine is None:
            self._affine = self._build_affine()
        return self._affine

    def _build_affine(self) -> Tuple[sps.csr_matrix, np.ndarray]:
        n_out, n_in = self.output_size, self.input_size

        if self.kind == LayerKind.DENSE:
            return sps.csr_matrix(self.weights), np.array(self.bias)

        if self.kind == LayerKind.FLATTEN:
            return sps.identity(n_in, format="csr", dtype=np.float64), np.zeros(n_out)

        if self.kind == LayerKind.ZERO_PAD2D:
            height, width, channels = self.input_shape
            _, padded_w, _ = self.output_shape
            top, _, left, _ = self.padding
            i, j, c = np.meshgrid(np.arange(height), np.arange(width), np.arange(channels), indexing="ij")
            rows = ((i + top) * padded_w + (j + left)) * channels + c
            cols = (i * width + j) * channels + c
            matrix = sps.csr_matrix(
                (np.ones(rows.size), (rows.ravel(), cols.ravel())), shape=(n_out, n_in)
            )
            return matrix, np.zeros(n_out)

        # Conv2D, lowered to explicit sparse rows
        _, width, channels = self.input_shape
        out_h, out_w, out_c = self.output_shape
        kh, kw, _, _ = self.weights.shape
        sh, sw = self.stride
        oi, oj, di, dj, ci, co = np.meshgrid(
            np.arange(out_h), np.arange(out_w), np.arange(kh), np.arange(kw),
            np.arange(channels), np.arange(out_c), indexing="ij",
        )
        values = self.weights[di, dj, ci, co].ravel()
        rows = ((oi * out_w + oj) * out_c + co).ravel()
        cols = (((oi * sh + di) * width + (oj * sw + dj)) * channels + ci).ravel()
        keep = values != 0.0
        matrix = sps.csr_matrix((values[keep], (rows[keep], cols[keep])), shape=(n_out, n_in))
        return matrix, np.tile(self.bias, out_h * out_w)

    def pool_windows(self) -> np.ndarray:
        """
        Flattened input indices of every max-pooling window.

        Returns:
            Integer array of shape (output_size, pool_size ** 2), one row per
            output neuron in row-major order.
        """
        if self.kind != LayerKind.MAX_POOL2D:
            raise ShapeError(f"{self.kind.value} layer has no pooling windows")
        if self._windows is None:
            index = np.arange(self.input_size).reshape(self.input_shape)
            view = np.lib.stride_tricks.sliding_window_view(index, (self.pool_size, self.pool_size), axis=(0, 1))
            view = view[:: self.stride[0], :: self.stride[1]]
            windows = view.reshape(self.output_size, self.pool_size * self.pool_size)
            windows.setflags(write=False)
            self._windows = windows
        return self._windows

    def __eq__(self, other) -> bool:
        if not isinstance(other, LayerSpec):
            return False
        return (
            self.kind == other.kind
            and self.input_shape == other.input_shape
            and self.pool_size == other.pool_size
            and self.padding == other.padding
            and self.stride == other.stride
            and _arrays_equal(self.weights, other.weights)
            and _arrays_equal(self.bias, other.bias)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"LayerSpec(kind={self.kind.value}, input={self.input_shape}, output={self.output_shape})"


def _arrays_equal(a: Optional[np.ndarray], b: Optional[np.ndarray]) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return a.shape == b.shape and bool(np.array_equal(a, b))
