"""
Report repository interface.
"""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List, Sequence


class ReportRepositoryInterface(ABC):
    """
    Abstract sink for machine-readable run reports.

    Implementations write each output file once; callers hand over fully
    assembled, ordered content.
    """

    @abstractmethod
    def write_json(self, payload: Dict[str, Any], path: Path) -> None:
        """
        Write a JSON document.

        Raises:
            ReportWriteError: If the file cannot be written
        """
        pass

    @abstractmethod
    def write_csv(self, rows: List[Dict[str, Any]], columns: Sequence[str], path: Path) -> None:
        """
        Write rows as CSV with a header in ``columns`` order.

        Raises:
            ReportWriteError: If the file cannot be written
        """
        pass


class ReportWriteError(Exception):
    """Exception raised when a report file cannot be written."""

    def __init__(self, message: str, cause: Exception | None = None):
        super().__init__(message)
        self.cause = cause
