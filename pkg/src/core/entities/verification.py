"""
Verification result entities.

Values are natural-log quantities: a lower bound of 0 means the relative
prediction ratio never drops below 1.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .linear_program import ProblemVariant
from .lp_solution import LpStatus
from .network import ClassPair


@dataclass(frozen=True)
class PairBound:
    """
    Relaxed bounds on ln RPR of net1 w.r.t. net2 for one class pair.

    ``lower`` comes from minimizing the joint program; ``upper`` is the
    negated minimum of the program with the networks swapped. ``None`` means
    the solver did not certify that direction. For the pure-implication
    variant an infeasible direction is vacuously satisfied and recorded as
    an infinite bound.
    """

    pair: ClassPair
    lower: Optional[float]
    upper: Optional[float]
    lower_status: LpStatus
    upper_status: LpStatus
    wall_ms: float = 0.0
    deciding: bool = True

    @property
    def lower_available(self) -> bool:
        return self.lower is not None

    @property
    def upper_available(self) -> bool:
        return self.upper is not None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pair": [self.pair.i, self.pair.j],
            "lower": _finite_or_none(self.lower),
            "upper": _finite_or_none(self.upper),
            "lower_status": self.lower_status.value,
            "upper_status": self.upper_status.value,
            "deciding": self.deciding,
            "wall_ms": round(self.wall_ms, 3),
        }


@dataclass(frozen=True)
class ImplicationReport:
    """
    Outcome of checking N2 => N1 (and N1 => N2) on one sample region.

    ``implied`` certifies that N1 classifies correctly wherever N2 does;
    ``reverse_implied`` certifies the converse from the same pair bounds.
    Both are decided on the (correct class, j) pairs alone, with lower
    bounds allowed to fall short of ``threshold`` by at most
    ``decision_tol``; extra full-matrix pairs carry ``deciding=False``.
    """

    sample_id: str
    correct_class: int
    delta: float
    threshold: float
    variant: ProblemVariant
    pair_bounds: List[PairBound]
    implied: bool
    reverse_implied: bool
    skipped: bool = False
    skip_reason: Optional[str] = None
    bound_method: str = "interval"
    decision_tol: float = 0.0
    wall_ms: float = 0.0

    @property
    def deciding_bounds(self) -> List[PairBound]:
        """Bounds of the (correct class, j) pairs the decision is taken on."""
        return [b for b in self.pair_bounds if b.deciding]

    @property
    def min_lower(self) -> Optional[float]:
        values = [b.lower for b in self.deciding_bounds if b.lower is not None]
        return min(values) if values else None

    @property
    def max_upper(self) -> Optional[float]:
        values = [b.upper for b in self.deciding_bounds if b.upper is not None]
        return max(values) if values else None

    @classmethod
    def skipped_sample(
        cls, sample_id: str, label: int, delta: float, threshold: float,
        variant: ProblemVariant, reason: str, bound_method: str = "interval",
    ) -> "ImplicationReport":
        """Report for a sample that was not verified (e.g. misclassified center)."""
        return cls(
            sample_id=sample_id, correct_class=label, delta=delta, threshold=threshold,
            variant=variant, pair_bounds=[], implied=False, reverse_implied=False,
            skipped=True, skip_reason=reason, bound_method=bound_method,
        )

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        pairs = [b.to_dict() for b in self.pair_bounds]
        if not include_timing:
            for entry in pairs:
                entry.pop("wall_ms")
        payload = {
            "sample_id": self.sample_id,
            "correct_class": self.correct_class,
            "delta": self.delta,
            "threshold": self.threshold,
            "decision_tol": self.decision_tol,
            "variant": self.variant.value,
            "bound_method": self.bound_method,
            "implied": self.implied,
            "reverse_implied": self.reverse_implied,
            "skipped": self.skipped,
            "skip_reason": self.skip_reason,
            "min_lower": _finite_or_none(self.min_lower),
            "max_upper": _finite_or_none(self.max_upper),
            "pair_bounds": pairs,
        }
        if include_timing:
            payload["wall_ms"] = round(self.wall_ms, 3)
        return payload


@dataclass(frozen=True)
class ComparisonResult:
    """Joint versus independent analysis of one class pair."""

    pair: ClassPair
    joint_lower: float
    joint_upper: float
    independent_lower: float
    independent_upper: float

    @property
    def joint(self) -> float:
        return self.joint_lower

    @property
    def independent_sum(self) -> float:
        return self.independent_lower

    @property
    def range_joint(self) -> float:
        return self.joint_upper - self.joint_lower

    @property
    def range_independent(self) -> float:
        return self.independent_upper - self.independent_lower

    @property
    def improvement(self) -> float:
        """Percentage reduction of the range, (1 - joint/independent) * 100."""
        if self.range_independent <= 0:
            return 0.0
        return (1.0 - self.range_joint / self.range_independent) * 100.0

    def to_row(self) -> Dict[str, float]:
        return {
            "min_ind": self.independent_lower,
            "min_joint": self.joint_lower,
            "max_ind": self.independent_upper,
            "max_joint": self.joint_upper,
            "range_ind": self.range_independent,
            "range_joint": self.range_joint,
            "improvement_pct": self.improvement,
        }


@dataclass(frozen=True)
class ChainLink:
    """Transitivity audit of one class pair along a chain of networks."""

    pair: ClassPair
    adjacent_lowers: List[Optional[float]]
    end_to_end_lower: Optional[float]

    @property
    def all_adjacent_positive(self) -> bool:
        return all(v is not None and v > 0 for v in self.adjacent_lowers)

    @property
    def end_to_end_positive(self) -> bool:
        return self.end_to_end_lower is not None and self.end_to_end_lower > 0

    @property
    def agreement(self) -> bool:
        """Adjacent positivity and end-to-end positivity coincide."""
        return self.all_adjacent_positive == self.end_to_end_positive

    @property
    def counterexample(self) -> bool:
        """Every adjacent bound is positive but the end-to-end bound is not."""
        return self.all_adjacent_positive and not self.end_to_end_positive

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pair": [self.pair.i, self.pair.j],
            "adjacent_lowers": [_finite_or_none(v) for v in self.adjacent_lowers],
            "end_to_end_lower": _finite_or_none(self.end_to_end_lower),
            "all_adjacent_positive": self.all_adjacent_positive,
            "end_to_end_positive": self.end_to_end_positive,
            "agreement": self.agreement,
            "counterexample": self.counterexample,
        }


@dataclass(frozen=True)
class ChainReport:
    """Transitivity audit over all requested pairs."""

    network_names: List[str]
    delta: float
    links: List[ChainLink]

    @property
    def consistent(self) -> bool:
        return not any(link.counterexample for link in self.links)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "networks": list(self.network_names),
            "delta": self.delta,
            "consistent": self.consistent,
            "links": [link.to_dict() for link in self.links],
        }


@dataclass(frozen=True)
class RobustnessReport:
    """Certified local robustness of a single network."""

    sample_id: str
    network_name: str
    label: int
    delta: float
    margins: Dict[int, Optional[float]]
    certified: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sample_id": self.sample_id,
            "network": self.network_name,
            "label": self.label,
            "delta": self.delta,
            "certified": self.certified,
            "margins": {str(j): _finite_or_none(v) for j, v in sorted(self.margins.items())},
        }


@dataclass(frozen=True, eq=False)
class SampleOracleResult:
    """Empirical extrema of ln RPR over a region."""

    sampled_min: float
    sampled_max: float
    argmin: np.ndarray = field(repr=False)
    argmax: np.ndarray = field(repr=False)
    num_samples: int
    seed: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sampled_min": self.sampled_min,
            "sampled_max": self.sampled_max,
            "argmin": self.argmin.tolist(),
            "argmax": self.argmax.tolist(),
            "num_samples": self.num_samples,
            "seed": self.seed,
        }


def _finite_or_none(value: Optional[float]) -> Optional[float]:
    if value is None or not math.isfinite(value):
        return None
    return float(value)


def summarize(values: List[float]) -> Tuple[float, float]:
    """Mean and population standard deviation, (nan, nan) when empty."""
    if not values:
        return math.nan, math.nan
    array = np.asarray(values, dtype=np.float64)
    return float(array.mean()), float(array.std())
