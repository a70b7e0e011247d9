"""
LP solution entities.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class LpStatus(Enum):
    """Terminal solver status."""
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    ITERATION_LIMIT = "iteration_limit"
    NUMERICAL_ERROR = "numerical_error"


@dataclass(frozen=True, eq=False)
class LpSolution:
    """
    Result of one solve.

    Only an ``OPTIMAL`` objective may be used as a sound bound; every other
    status means the bound is unavailable.
    """

    status: LpStatus
    objective: float
    primal: np.ndarray = field(repr=False)
    iterations: int
    max_primal_violation: float

    @property
    def is_optimal(self) -> bool:
        return self.status == LpStatus.OPTIMAL


@dataclass(frozen=True)
class SolutionCertificate:
    """Independent residual check of a solution."""

    max_violation: float
    bound_certified: bool
