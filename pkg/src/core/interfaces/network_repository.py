"""
Network repository interface.

Defines the contract for loading and saving networks and input samples,
so the domain layer never depends on a concrete file format.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np

from ..entities.network import Network


@dataclass(frozen=True, eq=False)
class Sample:
    """One input sample with an optional ground-truth label."""

    id: str
    values: np.ndarray
    label: Optional[int] = None


class NetworkRepositoryInterface(ABC):
    """
    Abstract interface for network and sample persistence.
    """

    @abstractmethod
    def load_network(self, path: Path) -> Network:
        """
        Load and validate a network.

        Args:
            path: Location of the network file

        Returns:
            The validated Network

        Raises:
            NetworkLoadError: If the file is missing, malformed or inconsistent
        """
        pass

    @abstractmethod
    def save_network(self, network: Network, path: Path) -> None:
        """
        Persist a network with full 64-bit precision.

        Raises:
            NetworkLoadError: If the network cannot be written
        """
        pass

    @abstractmethod
    def load_samples(self, path: Path, num_classes: Optional[int] = None) -> List[Sample]:
        """
        Load input samples in file order.

        Args:
            path: Location of the sample file
            num_classes: When given, labels must be smaller than this

        Raises:
            NetworkLoadError: If the file is missing or a value is invalid
        """
        pass


class NetworkLoadError(Exception):
    """
    Exception raised when a network or sample file cannot be loaded or saved.

    Carries enough location detail (path, layer index, field, sample id) to
    point the user at the offending entry.
    """

    def __init__(
        self,
        message: str,
        cause: Exception | None = None,
        path: Optional[Path] = None,
        layer_index: Optional[int] = None,
        field: Optional[str] = None,
        sample_id: Optional[str] = None,
    ):
        """
        Initialize a load error.

        Args:
            message: Human-readable error description
            cause: Optional underlying exception that caused this error
            path: File being read or written
            layer_index: Index of the offending layer record
            field: Name of the offending field
            sample_id: Id of the offending sample
        """
        super().__init__(message)
        self.cause = cause
        self.path = path
        self.layer_index = layer_index
        self.field = field
        self.sample_id = sample_id
