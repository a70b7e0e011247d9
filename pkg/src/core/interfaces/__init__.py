"""
Abstract interfaces and ports for the core domain.

These define the contracts that outer layers must implement,
following the Dependency Inversion Principle.
"""

from .lp_solver import LpSolverInterface, SolverError
from .network_repository import NetworkLoadError, NetworkRepositoryInterface, Sample
from .report_repository import ReportRepositoryInterface, ReportWriteError

__all__ = [
    "LpSolverInterface", "SolverError",
    "NetworkLoadError", "NetworkRepositoryInterface", "Sample",
    "ReportRepositoryInterface", "ReportWriteError",
]
