"""Certified robustness use case."""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

from src.core.domain_services.verification import ImplicationVerifier
from src.core.entities.network import Network
from src.core.entities.region import InputRegion
from src.core.entities.verification import RobustnessReport
from src.core.interfaces.network_repository import Sample
from src.core.use_cases.verify_implication import resolve_label
from src.core.use_cases.worker_pool import map_in_pool

logger = logging.getLogger(__name__)


@dataclass
class CertificationRun:
    """Robustness reports of each network over a sample set."""

    delta: float
    reports: Dict[str, List[RobustnessReport]]

    def certified_pct(self, network_name: str) -> float:
        reports = self.reports[network_name]
        return 100.0 * sum(r.certified for r in reports) / len(reports) if reports else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "delta": self.delta,
            "networks": [
                {
                    "network": name,
                    "certified_pct": self.certified_pct(name),
                    "reports": [r.to_dict() for r in reports],
                }
                for name, reports in self.reports.items()
            ],
        }


class CertifyRobustnessUseCase:
    """Use case for certifying local robustness of individual networks."""

    def __init__(self, verifier: ImplicationVerifier, jobs: int = 1):
        self._verifier = verifier
        self._jobs = jobs

    async def execute(
        self,
        networks: Sequence[Network],
        samples: Sequence[Sample],
        delta: float,
        domain: Optional[tuple] = None,
    ) -> CertificationRun:
        """
        Certify every network on the region around every sample.

        Unlabelled samples take the first network's prediction at the center.
        Network names must be unique because reports are keyed by name.
        """
        low, high = domain if domain is not None else (None, None)
        labels = [resolve_label(sample, networks[0]) for sample in samples]
        work = [(net, index) for net in networks for index in range(len(samples))]

        def certify_one(item) -> RobustnessReport:
            net, index = item
            sample = samples[index]
            region = InputRegion(sample.values, delta, low, high)
            return self._verifier.certify_robustness(net, region, labels[index], sample_id=sample.id)

        results = await map_in_pool(certify_one, work, self._jobs)
        reports: Dict[str, List[RobustnessReport]] = {net.name: [] for net in networks}
        for (net, _), report in zip(work, results):
            reports[net.name].append(report)

        run = CertificationRun(delta=float(delta), reports=reports)
        for net in networks:
            logger.info(f"'{net.name}' certified on {run.certified_pct(net.name):.1f}% of samples at delta={delta}")
        return run
