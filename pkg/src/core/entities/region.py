"""
InputRegion entity - an l-infinity ball around a sample, optionally
clipped to a global input domain.
"""

import math
from typing import Optional

import numpy as np

from ..exceptions import NumericError, RegionError


def _as_vector(values, size: int, name: str) -> np.ndarray:
    array = np.broadcast_to(np.asarray(values, dtype=np.float64), (size,)).copy()
    if not np.all(np.isfinite(array)):
        raise NumericError(f"{name} contains non-finite values")
    array.setflags(write=False)
    return array


class InputRegion:
    """
    The neighbourhood B(center, delta), intersected with [domain_low, domain_high].

    The center is stored flattened; networks reshape it to their input shape.
    """

    def __init__(
        self,
        center,
        delta: float,
        domain_low=None,
        domain_high=None,
    ):
        """
        Initialize an input region.

        Args:
            center: The unperturbed sample (any shape, flattened internally)
            delta: Non-negative l-infinity radius
            domain_low: Optional scalar or per-dimension lower domain bound
            domain_high: Optional scalar or per-dimension upper domain bound

        Raises:
            RegionError: If delta is negative or the center lies outside the domain
            NumericError: If any value is not finite
        """
        center = np.asarray(center, dtype=np.float64).ravel()
        if center.size == 0:
            raise RegionError("Region center cannot be empty")
        self.center = _as_vector(center, center.size, "center")

        if not math.isfinite(float(delta)) or float(delta) < 0:
            raise RegionError(f"delta must be a finite non-negative number, got {delta}")
        self.delta = float(delta)

        if (domain_low is None) != (domain_high is None):
            raise RegionError("domain_low and domain_high must be given together")
        self.domain_low: Optional[np.ndarray] = None
        self.domain_high: Optional[np.ndarray] = None
        if domain_low is not None:
            self.domain_low = _as_vector(domain_low, center.size, "domain_low")
            self.domain_high = _as_vector(domain_high, center.size, "domain_high")
            if np.any(self.domain_low > self.domain_high):
                raise RegionError("domain_low exceeds domain_high")
            if np.any(self.center < self.domain_low) or np.any(self.center > self.domain_high):
                raise RegionError("Region center lies outside the input domain")

    @property
    def dimension(self) -> int:
        return self.center.size

    @property
    def has_domain(self) -> bool:
        return self.domain_low is not None

    def with_delta(self, delta: float) -> "InputRegion":
        """Same center and domain with another radius."""
        return InputRegion(self.center, delta, self.domain_low, self.domain_high)

    def __repr__(self) -> str:
        return f"InputRegion(dim={self.dimension}, delta={self.delta}, domain={'yes' if self.has_domain else 'no'})"
