"""API response schemas."""

from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class PairBoundResponse(BaseModel):
    """Relaxed bounds of one class pair."""

    pair: List[int] = Field(..., description="Class pair (i, j), 0-based")
    lower: Optional[float] = Field(..., description="Lower bound on ln RPR; null if unavailable or infinite")
    upper: Optional[float] = Field(..., description="Upper bound on ln RPR; null if unavailable or infinite")
    lower_status: str
    upper_status: str
    deciding: bool = Field(True, description="Pair (correct class, j) used for the decision")
    wall_ms: float


class ImplicationResponse(BaseModel):
    """Schema for implication verification responses."""

    sample_id: str
    correct_class: int
    delta: float
    threshold: float
    decision_tol: float = Field(..., description="Accepted shortfall of a lower bound below the threshold")
    variant: str
    bound_method: str
    implied: bool = Field(..., description="net2 => net1 holds on the region")
    reverse_implied: bool = Field(..., description="net1 => net2 holds on the region")
    skipped: bool
    skip_reason: Optional[str] = None
    min_lower: Optional[float] = None
    max_upper: Optional[float] = None
    pair_bounds: List[PairBoundResponse]
    wall_ms: float


class ComparisonRowResponse(BaseModel):
    """Joint and independent bounds of one class pair."""

    id: str
    i: int
    j: int
    min_ind: float
    min_joint: float
    max_ind: float
    max_joint: float
    range_ind: float
    range_joint: float
    improvement_pct: float


class ComparisonResponse(BaseModel):
    """Schema for joint versus independent comparison responses."""

    delta: float
    pairs: int
    skipped: List[str]
    aggregate: Dict[str, Dict[str, Optional[float]]] = Field(
        ...,
        description="Mean and standard deviation of every column"
    )
    rows: List[ComparisonRowResponse]


class ErrorResponse(BaseModel):
    """Schema for error responses."""

    error: str = Field(
        ...,
        description="Error message"
    )
    detail: str = Field(
        ...,
        description="Detailed error information"
    )


class HealthResponse(BaseModel):
    """Schema for health check responses."""

    status: str = Field(
        ...,
        description="Health status"
    )
    version: str = Field(
        ...,
        description="API version"
    )
