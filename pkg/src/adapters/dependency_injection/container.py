"""Dependency injection container."""

import logging
from functools import lru_cache
from typing import Callable, Optional

from src.core.domain_services.relax import RelaxOptions
from src.core.domain_services.verification import ImplicationVerifier, VerifierOptions
from src.core.entities.linear_program import LinearProgram
from src.core.interfaces.lp_solver import LpSolverInterface
from src.core.interfaces.report_repository import ReportRepositoryInterface
from src.core.use_cases.compare_analyses import CompareAnalysesUseCase
from src.core.use_cases.verify_implication import VerifyImplicationUseCase
from src.infrastructure.config import get_settings
from src.infrastructure.config.settings import Settings
from src.infrastructure.repositories.json_network_repository import JsonNetworkRepository
from src.infrastructure.repositories.report_repository import FileReportRepository
from src.infrastructure.solvers.revised_simplex import RevisedSimplexSolver, SolverOptions

logger = logging.getLogger(__name__)


def build_solver(settings: Settings, feas_tol: Optional[float] = None) -> LpSolverInterface:
    """Revised simplex solver configured from settings, with an optional tolerance override."""
    return RevisedSimplexSolver(
        SolverOptions(
            feas_tol=feas_tol if feas_tol is not None else settings.feas_tol,
            opt_tol=settings.opt_tol,
            max_iters=settings.max_iters,
            refactor_every=settings.refactor_every,
            bland_after=settings.bland_after,
        )
    )


def build_verifier_options(
    settings: Settings,
    bound_method: Optional[str] = None,
    corrupt_triangle: bool = False,
    decision_tol: Optional[float] = None,
) -> VerifierOptions:
    """Verifier options from settings; explicit arguments override IMPLYLP_BOUNDS and IMPLYLP_DECISION_TOL."""
    return VerifierOptions(
        relax=RelaxOptions(
            pure_margin=settings.pure_margin,
            phase_slack=settings.phase_slack,
            corrupt_triangle=corrupt_triangle,
        ),
        bound_method=bound_method or settings.bounds,
        decision_tol=decision_tol if decision_tol is not None else settings.decision_tol,
    )


def build_verifier(
    settings: Settings,
    bound_method: Optional[str] = None,
    feas_tol: Optional[float] = None,
    lp_sink: Optional[Callable[[LinearProgram], None]] = None,
    decision_tol: Optional[float] = None,
) -> ImplicationVerifier:
    """Verifier wired to a freshly configured solver."""
    return ImplicationVerifier(
        build_solver(settings, feas_tol),
        build_verifier_options(settings, bound_method, decision_tol=decision_tol),
        lp_sink=lp_sink,
    )


@lru_cache()
def get_network_repository() -> JsonNetworkRepository:
    """Get network repository dependency."""
    return JsonNetworkRepository()


@lru_cache()
def get_report_repository() -> ReportRepositoryInterface:
    """Get report repository dependency."""
    return FileReportRepository()


@lru_cache()
def get_verifier() -> ImplicationVerifier:
    """Get the shared verifier used by the HTTP API."""
    settings = get_settings()
    logger.info(f"Using revised simplex solver with '{settings.bounds}' bounds")
    return build_verifier(settings)


def get_verify_use_case() -> VerifyImplicationUseCase:
    """Get verify implication use case dependency."""
    return VerifyImplicationUseCase(verifier=get_verifier(), jobs=get_settings().jobs)


def get_compare_use_case() -> CompareAnalysesUseCase:
    """Get compare analyses use case dependency."""
    return CompareAnalysesUseCase(verifier=get_verifier(), jobs=get_settings().jobs)
