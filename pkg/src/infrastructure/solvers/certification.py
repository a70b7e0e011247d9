"""
Independent residual check of LP solutions.
"""

from src.core.entities.linear_program import LinearProgram
from src.core.entities.lp_solution import LpSolution, SolutionCertificate


def verify_solution(lp: LinearProgram, solution: LpSolution, feas_tol: float = 1e-9) -> SolutionCertificate:
    """
    Recompute every row and bound residual at the returned primal point.

    The check reads the program's own rows, not the solver's standard form,
    so it catches errors introduced by slacks, artificials or factorization.

    Args:
        lp: The program that was solved
        solution: Solver output
        feas_tol: Largest accepted residual

    Returns:
        SolutionCertificate; ``bound_certified`` also requires an OPTIMAL status
    """
    violation = lp.max_violation(solution.primal)
    return SolutionCertificate(
        max_violation=violation,
        bound_certified=solution.is_optimal and violation <= feas_tol,
    )
