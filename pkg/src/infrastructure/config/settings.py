"""Application settings and configuration."""

import os
from functools import lru_cache
from typing import List

from src.core.exceptions import ConfigurationError

BOUND_METHODS = ("interval", "lp")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _env_int(name: str, default: int, problems: List[str]) -> int:
    raw = os.getenv(name, str(default))
    try:
        return int(raw)
    except ValueError:
        problems.append(f"{name} must be an integer, got '{raw}'")
        return default


def _env_float(name: str, default: float, problems: List[str]) -> float:
    raw = os.getenv(name, repr(default))
    try:
        return float(raw)
    except ValueError:
        problems.append(f"{name} must be a number, got '{raw}'")
        return default


class Settings:
    """Application settings loaded from environment variables."""

    def __init__(self):
        """
        Initialize settings from environment variables.

        Every unparseable or out-of-range variable is collected first and
        reported together in one error.

        Raises:
            ConfigurationError: If a variable cannot be parsed or is out of range
        """
        # Load .env file if present
        self._load_env_file()
        problems: List[str] = []

        # Parallelism
        self.jobs: int = _env_int("IMPLYLP_JOBS", 1, problems)

        # Solver
        self.feas_tol: float = _env_float("IMPLYLP_FEAS_TOL", 1e-9, problems)
        self.opt_tol: float = _env_float("IMPLYLP_OPT_TOL", 1e-9, problems)
        self.max_iters: int = _env_int("IMPLYLP_MAX_ITERS", 50000, problems)
        self.refactor_every: int = _env_int("IMPLYLP_REFACTOR_EVERY", 50, problems)
        self.bland_after: int = _env_int("IMPLYLP_BLAND_AFTER", 200, problems)

        # Relaxation and decision
        self.bounds: str = os.getenv("IMPLYLP_BOUNDS", "interval").strip().lower()
        self.pure_margin: float = _env_float("IMPLYLP_PURE_MARGIN", 1e-6, problems)
        self.phase_slack: float = _env_float("IMPLYLP_PHASE_SLACK", 1e-9, problems)
        self.decision_tol: float = _env_float("IMPLYLP_DECISION_TOL", 1e-9, problems)

        # Reproducibility and logging
        self.seed: int = _env_int("IMPLYLP_SEED", 0, problems)
        self.log_level: str = os.getenv("IMPLYLP_LOG_LEVEL", "INFO").strip().upper()

        # HTTP API
        self.port: int = _env_int("PORT", 8000, problems)

        self._validate(problems)

    def _load_env_file(self):
        """Load environment variables from .env file if it exists."""
        try:
            from dotenv import load_dotenv
            load_dotenv()
        except ImportError:
            # python-dotenv not installed, skip loading .env file
            pass

    def _validate(self, problems: List[str]) -> None:
        if self.jobs < 1:
            problems.append(f"IMPLYLP_JOBS must be >= 1, got {self.jobs}")
        if self.feas_tol <= 0 or self.opt_tol <= 0:
            problems.append("solver tolerances must be positive")
        if self.max_iters < 1 or self.refactor_every < 1 or self.bland_after < 1:
            problems.append("solver limits must be positive integers")
        if self.bounds not in BOUND_METHODS:
            problems.append(f"IMPLYLP_BOUNDS must be one of {BOUND_METHODS}, got '{self.bounds}'")
        if self.pure_margin <= 0 or self.phase_slack < 0:
            problems.append("IMPLYLP_PURE_MARGIN must be positive and IMPLYLP_PHASE_SLACK non-negative")
        if self.decision_tol < 0:
            problems.append(f"IMPLYLP_DECISION_TOL must be non-negative, got {self.decision_tol}")
        if self.log_level not in LOG_LEVELS:
            problems.append(f"IMPLYLP_LOG_LEVEL must be one of {LOG_LEVELS}, got '{self.log_level}'")
        if problems:
            raise ConfigurationError("; ".join(problems))


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
