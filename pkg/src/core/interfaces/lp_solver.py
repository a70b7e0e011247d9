"""
LP solver interface.

The verification engine only needs a minimizer for bounded-variable
programs; the concrete algorithm lives in infrastructure.
"""

from abc import ABC, abstractmethod

from ..entities.linear_program import LinearProgram
from ..entities.lp_solution import LpSolution


class LpSolverInterface(ABC):
    """Abstract minimizer of a LinearProgram."""

    @abstractmethod
    def solve(self, lp: LinearProgram) -> LpSolution:
        """
        Minimize the program.

        Args:
            lp: Program with finite variable bounds

        Returns:
            LpSolution; only an OPTIMAL status yields a usable bound

        Raises:
            SolverError: If the program cannot be handed to the solver at all
        """
        pass

    @property
    @abstractmethod
    def feas_tol(self) -> float:
        """Primal feasibility tolerance used to certify solutions."""
        pass


class SolverError(Exception):
    """
    Exception raised on a hard solver failure.

    Seen when a program that must be feasible is reported infeasible,
    which points at a construction bug rather than a loose bound.
    """

    def __init__(self, message: str, cause: Exception | None = None):
        super().__init__(message)
        self.cause = cause
