"""
Repository implementations for data access.

Provides concrete implementations of repository interfaces.
"""

from .json_network_repository import JsonNetworkRepository
from .report_repository import FileReportRepository

__all__ = ["JsonNetworkRepository", "FileReportRepository"]
