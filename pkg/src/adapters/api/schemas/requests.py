"""API request schemas."""

from typing import List, Literal, Optional

from pydantic import BaseModel, Field

from src.infrastructure.repositories.network_file import NetworkFile


class PairRequest(BaseModel):
    """Fields shared by requests on a pair of networks around one sample."""

    net1: NetworkFile = Field(..., description="Candidate implied network (NetworkFile document)")
    net2: NetworkFile = Field(..., description="Candidate implier (NetworkFile document)")
    sample: List[float] = Field(..., min_length=1, description="Region center, flattened row-major")
    label: Optional[int] = Field(
        None,
        ge=0,
        description="Correct class of the sample. Null uses net2's prediction at the center."
    )
    delta: float = Field(..., ge=0, description="l-infinity radius of the region")
    sample_id: str = Field("sample", description="Identifier echoed in the response")
    allow_misclassified: bool = Field(
        False,
        description="Verify even if a network misclassifies the center"
    )


class VerifyRequest(PairRequest):
    """Schema for implication verification requests."""

    threshold: float = Field(0.0, description="Decision threshold on the lower bounds")
    variant: Literal["margin", "pure"] = Field("margin", description="Joint program variant")
    full_matrix: bool = Field(False, description="Bound every ordered class pair")


class CompareRequest(PairRequest):
    """Schema for joint versus independent comparison requests."""
