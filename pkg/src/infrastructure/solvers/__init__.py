"""
LP solver implementations and LP file export.
"""

from .certification import verify_solution
from .lp_writer import LpExporter, export_lp, format_lp
from .revised_simplex import RevisedSimplexSolver, SolverOptions

__all__ = ["LpExporter", "RevisedSimplexSolver", "SolverOptions", "export_lp", "format_lp", "verify_solution"]
