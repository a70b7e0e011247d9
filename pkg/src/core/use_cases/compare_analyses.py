"""Joint versus independent comparison use case."""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

from src.core.domain_services.model import predict, require_compatible
from src.core.domain_services.verification import ImplicationVerifier
from src.core.entities.network import ClassPair, Network
from src.core.entities.region import InputRegion
from src.core.entities.verification import ComparisonResult, summarize
from src.core.interfaces.network_repository import Sample
from src.core.use_cases.verify_implication import resolve_label
from src.core.use_cases.worker_pool import map_in_pool

logger = logging.getLogger(__name__)

COMPARISON_COLUMNS = ("min_ind", "min_joint", "max_ind", "max_joint", "range_ind", "range_joint", "improvement_pct")


@dataclass
class ComparisonRow:
    sample_id: str
    result: ComparisonResult

    def to_row(self) -> Dict[str, Any]:
        return {
            "id": self.sample_id,
            "i": self.result.pair.i,
            "j": self.result.pair.j,
            **self.result.to_row(),
        }


@dataclass
class ComparisonRun:
    """Per-pair comparisons plus their mean and standard deviation."""

    delta: float
    rows: List[ComparisonRow]
    skipped: List[str]

    def aggregate(self) -> Dict[str, Dict[str, float]]:
        """Mean and population standard deviation of every column."""
        table = {}
        for column in COMPARISON_COLUMNS:
            mean, std = summarize([row.result.to_row()[column] for row in self.rows])
            table[column] = {"mean": mean, "std": std}
        return table

    def to_dict(self) -> Dict[str, Any]:
        return {
            "delta": self.delta,
            "pairs": len(self.rows),
            "skipped": list(self.skipped),
            "aggregate": {
                column: {key: None if math.isnan(value) else value for key, value in stats.items()}
                for column, stats in self.aggregate().items()
            },
            "rows": [row.to_row() for row in self.rows],
        }


class CompareAnalysesUseCase:
    """Use case for measuring how much the joint program tightens the bounds."""

    def __init__(self, verifier: ImplicationVerifier, jobs: int = 1):
        self._verifier = verifier
        self._jobs = jobs

    async def execute(
        self,
        net1: Network,
        net2: Network,
        samples: Sequence[Sample],
        delta: float,
        allow_misclassified: bool = False,
        domain: Optional[tuple] = None,
    ) -> ComparisonRun:
        """
        Compare joint and independent bounds on every pair (c, j) of every sample.

        Returns:
            ComparisonRun with rows in sample then pair order

        Raises:
            CompatibilityError: If the networks are not compatible
            SolverError: If any program fails to solve
        """
        require_compatible(net1, net2)
        low, high = domain if domain is not None else (None, None)

        def compare_one(sample: Sample) -> Optional[List[ComparisonRow]]:
            label = resolve_label(sample, net2)
            if not allow_misclassified and (predict(net1, sample.values), predict(net2, sample.values)) != (label, label):
                logger.info(f"Skipping sample '{sample.id}': center misclassified")
                return None
            region = InputRegion(sample.values, delta, low, high)
            bounds1 = self._verifier.compute_bounds(net1, region)
            bounds2 = self._verifier.compute_bounds(net2, region)
            return [
                ComparisonRow(
                    sample.id,
                    self._verifier.compare_independent(net1, net2, region, ClassPair(label, j), bounds1, bounds2),
                )
                for j in range(net1.num_classes)
                if j != label
            ]

        results = await map_in_pool(compare_one, list(samples), self._jobs)
        rows: List[ComparisonRow] = []
        skipped = []
        for sample, result in zip(samples, results):
            if result is None:
                skipped.append(sample.id)
            else:
                rows.extend(result)
        run = ComparisonRun(delta=float(delta), rows=rows, skipped=skipped)
        if rows:
            logger.info(f"Compared {len(rows)} pairs: mean improvement {run.aggregate()['improvement_pct']['mean']:.2f}%")
        return run
