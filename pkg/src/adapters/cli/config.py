"""
Run configurations of the command-line commands.

Each command validates one pydantic model before doing any work. Values come
from an optional JSON config file, then explicit flags, with the remaining
defaults taken from Settings (``IMPLYLP_*`` environment variables).
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Type, TypeVar

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.core.entities.quantization import QuantScheme
from src.core.exceptions import ConfigurationError
from src.infrastructure.config.settings import BOUND_METHODS, LOG_LEVELS, Settings

C = TypeVar("C", bound="RunConfig")


class RunConfig(BaseModel):
    """Options shared by every command."""

    model_config = ConfigDict(extra="forbid")

    log_level: str = "INFO"
    jobs: int = Field(1, ge=1)
    seed: int = Field(0, ge=0)
    out: Optional[Path] = None
    format: Literal["json", "csv", "both"] = "both"

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if value not in LOG_LEVELS:
            raise ValueError(f"must be one of {LOG_LEVELS}")
        return value

    @classmethod
    def settings_defaults(cls, settings: Settings) -> Dict[str, Any]:
        """Defaults supplied by the environment for the fields this model declares."""
        candidates = {
            "log_level": settings.log_level,
            "jobs": settings.jobs,
            "seed": settings.seed,
            "bounds": settings.bounds,
            "feas_tol": settings.feas_tol,
            "decision_tol": settings.decision_tol,
        }
        return {key: value for key, value in candidates.items() if key in cls.model_fields}

    def output_path(self, command: str, suffix: str) -> Path:
        """``<out>.<suffix>``, where ``out`` defaults to ``implylp_<command>``."""
        stem = self.out if self.out is not None else Path(f"implylp_{command}")
        if stem.suffix in (".json", ".csv"):
            stem = stem.with_suffix("")
        return stem.with_name(f"{stem.name}.{suffix}")


class SolveConfig(RunConfig):
    """Options of commands that solve relaxed programs."""

    bounds: str = "interval"
    feas_tol: float = Field(1e-9, gt=0)
    decision_tol: float = Field(1e-9, ge=0)
    export_lp: Optional[Path] = None
    domain: Optional[Tuple[float, float]] = None

    @field_validator("bounds")
    @classmethod
    def _known_bounds(cls, value: str) -> str:
        value = value.lower()
        if value not in BOUND_METHODS:
            raise ValueError(f"must be one of {BOUND_METHODS}")
        return value

    @field_validator("domain")
    @classmethod
    def _ordered_domain(cls, value):
        if value is not None and value[0] > value[1]:
            raise ValueError("domain low exceeds domain high")
        return value


class PairConfig(SolveConfig):
    """Two networks and a sample file."""

    net1: Path
    net2: Path
    samples: Path
    delta: List[float] = Field(..., min_length=1)
    allow_misclassified: bool = False

    @field_validator("delta")
    @classmethod
    def _non_negative(cls, value: List[float]) -> List[float]:
        if any(d < 0 for d in value):
            raise ValueError("deltas must be non-negative")
        return value


class VerifyConfig(PairConfig):
    threshold: float = 0.0
    variant: Literal["margin", "pure"] = "margin"
    full_matrix: bool = False

    @field_validator("delta")
    @classmethod
    def _single_delta(cls, value: List[float]) -> List[float]:
        if len(value) != 1:
            raise ValueError("verify takes exactly one delta; use sweep for several")
        return value


class SweepConfig(PairConfig):
    threshold: float = 0.0
    variant: Literal["margin", "pure"] = "margin"

    @field_validator("delta")
    @classmethod
    def _several_deltas(cls, value: List[float]) -> List[float]:
        if len(set(value)) < 2:
            raise ValueError("sweep needs at least 2 distinct deltas")
        return value


class CompareConfig(PairConfig):
    @field_validator("delta")
    @classmethod
    def _single_delta(cls, value: List[float]) -> List[float]:
        if len(value) != 1:
            raise ValueError("compare takes exactly one delta")
        return value


class CertifyConfig(SolveConfig):
    nets: List[Path] = Field(..., min_length=1)
    samples: Path
    delta: List[float] = Field(..., min_length=1, max_length=1)


class CompactConfig(RunConfig):
    net: Path
    out: Path
    prune: Optional[float] = Field(None, ge=0.0, le=1.0)
    quantize: Optional[str] = None
    scope: Literal["joint", "separate"] = "joint"

    @field_validator("quantize")
    @classmethod
    def _known_scheme(cls, value: Optional[str]) -> Optional[str]:
        if value is not None:
            QuantScheme.parse(value)
        return value

    @model_validator(mode="after")
    def _one_scheme(self) -> "CompactConfig":
        if (self.prune is None) == (self.quantize is None):
            raise ValueError("give exactly one of --prune or --quantize")
        return self


class AuditConfig(SolveConfig):
    trials: int = Field(100, ge=1)
    delta: List[float] = Field(default_factory=lambda: [0.01, 0.05, 0.2], min_length=1)
    samples_per_instance: int = Field(10000, ge=1)
    inject_fault: Optional[Literal["triangle-intercept"]] = None

    @field_validator("delta")
    @classmethod
    def _positive(cls, value: List[float]) -> List[float]:
        if any(d <= 0 for d in value):
            raise ValueError("audit deltas must be positive")
        return value


class FixtureConfig(RunConfig):
    kind: Literal["demo", "random", "uniform"] = "demo"
    out_dir: Path
    count: int = Field(2, ge=1)


def read_config_file(path: Optional[Path]) -> Dict[str, Any]:
    """
    Keys of a JSON config file, or an empty dict when no file is given.

    Raises:
        ConfigurationError: If the file cannot be read or is not a JSON object
    """
    if path is None:
        return {}
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigurationError(f"Cannot read config file {path}: {e.strerror or e}", cause=e)
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Config file {path} is not valid JSON: {e.msg}", cause=e)
    if not isinstance(document, dict):
        raise ConfigurationError(f"Config file {path} must hold a JSON object")
    return {key.replace("-", "_"): value for key, value in document.items()}


def build_config(
    model: Type[C], flags: Dict[str, Any], settings: Settings, config_path: Optional[Path] = None
) -> C:
    """
    Merge defaults, config file and flags, then validate once.

    Flags left at ``None`` do not override the file or the defaults.

    Raises:
        ConfigurationError: With every validation problem in one message
    """
    values = model.settings_defaults(settings)
    values.update(read_config_file(config_path))
    values.update({key: value for key, value in flags.items() if value is not None})
    try:
        return model.model_validate(values)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in error['loc']) or 'config'}: {error['msg']}" for error in e.errors()
        )
        raise ConfigurationError(f"Invalid configuration: {problems}", cause=e)
