"""
Compaction schemes - simulated post-training quantization and pruning scope.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional


class QuantKind(Enum):
    """Target precision of a quantized network."""
    FLOAT16 = "float16"
    INT16 = "int16"
    INT8 = "int8"
    INT4 = "int4"

    @property
    def bits(self) -> int:
        return {"float16": 16, "int16": 16, "int8": 8, "int4": 4}[self.value]

    @property
    def is_integer(self) -> bool:
        return self != QuantKind.FLOAT16


@dataclass(frozen=True)
class QuantScheme:
    """
    Per-tensor quantization scheme.

    Integer kinds use the symmetric range [-qmax, qmax] with
    qmax = 2^(bits-1) - 1.
    """

    kind: QuantKind
    granularity: str = "per-tensor"

    def __post_init__(self):
        if self.granularity != "per-tensor":
            raise ValueError(f"Only per-tensor quantization is supported, got '{self.granularity}'")

    @property
    def qmax(self) -> Optional[int]:
        if not self.kind.is_integer:
            return None
        return 2 ** (self.kind.bits - 1) - 1

    @classmethod
    def parse(cls, name: str) -> "QuantScheme":
        """Build a scheme from a name such as ``int8`` (case-insensitive)."""
        try:
            return cls(QuantKind(name.strip().lower()))
        except ValueError as e:
            choices = ", ".join(kind.value for kind in QuantKind)
            raise ValueError(f"Unknown quantization scheme '{name}' (choose from {choices})") from e


class PruneScope(Enum):
    """Which values share one pruning threshold."""
    JOINT = "joint"
    SEPARATE = "separate"
