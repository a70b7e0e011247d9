"""Verify implication use case."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from src.core.domain_services.model import predict, require_compatible
from src.core.domain_services.verification import ImplicationVerifier
from src.core.entities.linear_program import ProblemVariant
from src.core.entities.network import Network
from src.core.entities.verification import ImplicationReport
from src.core.exceptions import ClassIndexError
from src.core.interfaces.network_repository import Sample
from src.core.use_cases.worker_pool import map_in_pool

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ("id", "delta", "implied", "min_lower", "max_upper", "wall_ms")


def _percentage(flags: List[bool]) -> float:
    return 100.0 * sum(flags) / len(flags) if flags else 0.0


@dataclass
class VerificationRun:
    """Reports of one verification pass over a sample set at one radius."""

    delta: float
    reports: List[ImplicationReport] = field(default_factory=list)

    @property
    def verified(self) -> List[ImplicationReport]:
        return [r for r in self.reports if not r.skipped]

    @property
    def implied_count(self) -> int:
        return sum(r.implied for r in self.verified)

    @property
    def implied_pct(self) -> float:
        """Established implication N2 => N1 over the verified samples."""
        return _percentage([r.implied for r in self.verified])

    @property
    def reverse_pct(self) -> float:
        """Established implication N1 => N2 over the verified samples."""
        return _percentage([r.reverse_implied for r in self.verified])

    def summary_rows(self) -> List[Dict[str, Any]]:
        return [
            {
                "id": r.sample_id,
                "delta": r.delta,
                "implied": r.implied,
                "min_lower": r.min_lower,
                "max_upper": r.max_upper,
                "wall_ms": round(r.wall_ms, 3),
            }
            for r in self.reports
        ]

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        return {
            "delta": self.delta,
            "samples": len(self.reports),
            "verified": len(self.verified),
            "skipped": len(self.reports) - len(self.verified),
            "implied_count": self.implied_count,
            "implied_pct": self.implied_pct,
            "reverse_implied_pct": self.reverse_pct,
            "reports": [r.to_dict(include_timing) for r in self.reports],
        }


def resolve_label(sample: Sample, reference: Network) -> int:
    """
    Ground-truth label of a sample, or the reference network's prediction
    at the center when the sample file carries none.
    """
    if sample.label is not None:
        if not 0 <= sample.label < reference.num_classes:
            raise ClassIndexError(
                f"Sample '{sample.id}': label {sample.label} out of range for {reference.num_classes} classes"
            )
        return sample.label
    label = predict(reference, sample.values)
    logger.debug(f"Sample '{sample.id}' has no label, using prediction {label} of '{reference.name}'")
    return label


class VerifyImplicationUseCase:
    """Use case for checking N2 => N1 over a set of samples."""

    def __init__(self, verifier: ImplicationVerifier, jobs: int = 1):
        self._verifier = verifier
        self._jobs = jobs

    async def execute(
        self,
        net1: Network,
        net2: Network,
        samples: Sequence[Sample],
        delta: float,
        threshold: float = 0.0,
        variant: ProblemVariant = ProblemVariant.JOINT_MARGIN,
        allow_misclassified: bool = False,
        full_matrix: bool = False,
        domain: Optional[tuple] = None,
    ) -> VerificationRun:
        """
        Verify every sample region around the given samples.

        Args:
            net1: Candidate implied network
            net2: Candidate implier
            samples: Region centers in report order
            delta: Region radius
            threshold: Decision threshold on the lower bounds
            variant: Joint program variant
            allow_misclassified: Also verify samples misclassified at the center
            full_matrix: Bound every ordered class pair, not only the deciding ones
            domain: Optional (low, high) input domain

        Returns:
            VerificationRun with one report per sample, in sample order

        Raises:
            CompatibilityError: If the networks are not compatible
            ClassIndexError: If a sample label is out of range
            SolverError: If a relaxed program fails hard
        """
        require_compatible(net1, net2)
        labels = [resolve_label(sample, net2) for sample in samples]

        def verify_one(index: int) -> ImplicationReport:
            sample = samples[index]
            return self._verifier.verify_implication(
                net1, net2, sample.values, labels[index], delta,
                threshold=threshold,
                variant=variant,
                allow_misclassified=allow_misclassified,
                sample_id=sample.id,
                full_matrix=full_matrix,
                domain=domain,
            )

        reports = await map_in_pool(verify_one, list(range(len(samples))), self._jobs)
        run = VerificationRun(delta=float(delta), reports=reports)
        logger.info(
            f"delta={delta}: {run.implied_count}/{len(run.verified)} implied "
            f"({run.implied_pct:.1f}%), reverse {run.reverse_pct:.1f}%, "
            f"{len(reports) - len(run.verified)} skipped"
        )
        return run
