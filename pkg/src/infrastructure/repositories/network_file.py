"""
On-disk JSON schemas for networks and samples.

Weights are flattened row-major with their shape stored next to them, so a
file can be parsed without knowing the layer semantics. Only
``format_version`` "1" is accepted.
"""

import math
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

FORMAT_VERSION = "1"


class LayerRecord(BaseModel):
    """One layer of a NetworkFile."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["dense", "conv2d", "max_pool2d", "zero_pad2d", "flatten", "relu"]
    input_shape: List[int] = Field(..., min_length=1)
    output_shape: Optional[List[int]] = None
    weights_shape: Optional[List[int]] = None
    weights: Optional[List[float]] = None
    bias: Optional[List[float]] = None
    pool_size: Optional[int] = Field(None, gt=0)
    padding: Optional[List[int]] = Field(None, min_length=4, max_length=4)
    stride: Optional[List[int]] = Field(None, min_length=2, max_length=2)


class NetworkFile(BaseModel):
    """A network serialized as JSON."""

    model_config = ConfigDict(extra="forbid")

    format_version: str
    name: Optional[str] = None
    layers: List[LayerRecord]

    @field_validator("format_version")
    @classmethod
    def _known_version(cls, value: str) -> str:
        if value != FORMAT_VERSION:
            raise ValueError(f"unsupported format_version '{value}', expected '{FORMAT_VERSION}'")
        return value

    @field_validator("layers")
    @classmethod
    def _non_empty(cls, value: List[LayerRecord]) -> List[LayerRecord]:
        if not value:
            raise ValueError("must be a non-empty list")
        return value


class SampleRecord(BaseModel):
    """One input sample."""

    model_config = ConfigDict(extra="forbid")

    id: str
    values: List[float] = Field(..., min_length=1)
    label: Optional[int] = Field(None, ge=0)

    @field_validator("values")
    @classmethod
    def _finite(cls, values: List[float]) -> List[float]:
        if not all(math.isfinite(v) for v in values):
            raise ValueError("values must be finite")
        return values


class SampleFile(BaseModel):
    """A list of samples, kept in file order."""

    model_config = ConfigDict(extra="forbid")

    samples: List[SampleRecord] = Field(default_factory=list)
    num_classes: Optional[int] = Field(None, ge=1)
