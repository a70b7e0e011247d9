"""Compact network use case."""

import logging
from typing import Any, Dict, Optional, Tuple

from src.core.domain_services.compaction import compaction_summary, prune_mbp, quantize
from src.core.entities.network import Network
from src.core.entities.quantization import PruneScope, QuantScheme
from src.core.exceptions import ConfigurationError

logger = logging.getLogger(__name__)


class CompactNetworkUseCase:
    """Use case for producing a pruned or quantized copy of a network."""

    async def execute(
        self,
        network: Network,
        prune: Optional[float] = None,
        scheme: Optional[QuantScheme] = None,
        scope: PruneScope = PruneScope.JOINT,
    ) -> Tuple[Network, Dict[str, Any]]:
        """
        Compact a network with exactly one scheme.

        Args:
            network: Source network, left untouched
            prune: Magnitude pruning fraction in [0, 1]
            scheme: Quantization scheme
            scope: Pruning threshold scope

        Returns:
            The compact network and its sparsity/precision summary

        Raises:
            ConfigurationError: If neither or both schemes are given
        """
        if (prune is None) == (scheme is None):
            raise ConfigurationError("Give exactly one of a pruning fraction or a quantization scheme")

        if prune is not None:
            compact = prune_mbp(network, prune, scope)
            method = {"method": "prune", "fraction": prune, "scope": scope.value}
        else:
            compact = quantize(network, scheme)
            method = {"method": "quantize", "kind": scheme.kind.value, "granularity": scheme.granularity}

        summary = {**compaction_summary(network, compact), **method}
        logger.info(
            f"Compacted '{network.name}' into '{compact.name}': "
            f"{summary['zeros']}/{summary['parameters']} zeros, max change {summary['max_abs_change']:.3g}"
        )
        return compact, summary
