"""Perturbation sweep use case."""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

from src.core.entities.linear_program import ProblemVariant
from src.core.entities.network import Network
from src.core.exceptions import ConfigurationError
from src.core.interfaces.network_repository import Sample
from src.core.use_cases.verify_implication import VerificationRun, VerifyImplicationUseCase

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ("id", "delta", "implied", "reverse_implied", "min_lower", "max_upper", "wall_ms")


@dataclass
class SweepRun:
    """Verification runs over increasing radii."""

    runs: List[VerificationRun]
    monotonicity_violations: List[Dict[str, Any]]

    @property
    def monotone(self) -> bool:
        return not self.monotonicity_violations

    def rows(self) -> List[Dict[str, Any]]:
        """One row per (sample, delta)."""
        rows = []
        for run in self.runs:
            for report in run.reports:
                rows.append({
                    "id": report.sample_id,
                    "delta": report.delta,
                    "implied": report.implied,
                    "reverse_implied": report.reverse_implied,
                    "min_lower": report.min_lower,
                    "max_upper": report.max_upper,
                    "wall_ms": round(report.wall_ms, 3),
                })
        return rows

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        return {
            "deltas": [run.delta for run in self.runs],
            "implied_pct": [run.implied_pct for run in self.runs],
            "reverse_implied_pct": [run.reverse_pct for run in self.runs],
            "implied_count": [run.implied_count for run in self.runs],
            "monotone": self.monotone,
            "monotonicity_violations": self.monotonicity_violations,
            "runs": [run.to_dict(include_timing) for run in self.runs],
        }


class SweepDeltasUseCase:
    """Use case for re-running verification at several perturbation radii."""

    def __init__(self, verify_use_case: VerifyImplicationUseCase):
        self._verify = verify_use_case

    async def execute(
        self,
        net1: Network,
        net2: Network,
        samples: Sequence[Sample],
        deltas: Sequence[float],
        threshold: float = 0.0,
        variant: ProblemVariant = ProblemVariant.JOINT_MARGIN,
        allow_misclassified: bool = False,
        domain: Optional[tuple] = None,
    ) -> SweepRun:
        """
        Verify all samples at every radius, smallest radius first.

        The implied count is expected to be non-increasing in delta; a
        violation is logged as a warning and reported, never raised.

        Raises:
            ConfigurationError: If fewer than two distinct radii are given
        """
        ordered = sorted({float(d) for d in deltas})
        if len(ordered) < 2:
            raise ConfigurationError(f"A sweep needs at least 2 distinct deltas, got {list(deltas)}")

        runs = []
        for delta in ordered:
            runs.append(await self._verify.execute(
                net1, net2, samples, delta,
                threshold=threshold,
                variant=variant,
                allow_misclassified=allow_misclassified,
                domain=domain,
            ))

        violations = []
        for smaller, larger in zip(runs, runs[1:]):
            if larger.implied_count > smaller.implied_count:
                violations.append({
                    "delta_from": smaller.delta,
                    "delta_to": larger.delta,
                    "implied_from": smaller.implied_count,
                    "implied_to": larger.implied_count,
                })
                logger.warning(
                    f"Implied count grew from {smaller.implied_count} at delta={smaller.delta} "
                    f"to {larger.implied_count} at delta={larger.delta}"
                )
        return SweepRun(runs=runs, monotonicity_violations=violations)
