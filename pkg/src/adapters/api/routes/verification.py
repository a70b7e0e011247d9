"""Verification API routes."""

import numpy as np
from fastapi import APIRouter, Depends

from src.adapters.api.schemas.requests import CompareRequest, PairRequest, VerifyRequest
from src.adapters.api.schemas.responses import ComparisonResponse, ErrorResponse, ImplicationResponse
from src.adapters.dependency_injection.container import (
    get_compare_use_case,
    get_network_repository,
    get_verify_use_case,
)
from src.core.entities.linear_program import ProblemVariant
from src.core.interfaces.network_repository import Sample
from src.core.use_cases.compare_analyses import CompareAnalysesUseCase
from src.core.use_cases.verify_implication import VerifyImplicationUseCase

router = APIRouter(tags=["Verification"])

ERROR_RESPONSES = {
    400: {"model": ErrorResponse},
    500: {"model": ErrorResponse},
}


def _networks_and_sample(request: PairRequest):
    repository = get_network_repository()
    net1 = repository.parse_network(request.net1.model_dump(exclude_none=True))
    net2 = repository.parse_network(request.net2.model_dump(exclude_none=True))
    sample = Sample(id=request.sample_id, values=np.array(request.sample, dtype=np.float64), label=request.label)
    return net1, net2, sample


@router.post("/verify", response_model=ImplicationResponse, responses=ERROR_RESPONSES)
async def verify_implication(
    request: VerifyRequest,
    use_case: VerifyImplicationUseCase = Depends(get_verify_use_case),
) -> ImplicationResponse:
    """Check net2 => net1 (and the converse) on the region around one sample."""
    net1, net2, sample = _networks_and_sample(request)
    run = await use_case.execute(
        net1, net2, [sample], request.delta,
        threshold=request.threshold,
        variant=ProblemVariant(request.variant),
        allow_misclassified=request.allow_misclassified,
        full_matrix=request.full_matrix,
    )
    return ImplicationResponse(**run.reports[0].to_dict())


@router.post("/compare", response_model=ComparisonResponse, responses=ERROR_RESPONSES)
async def compare_analyses(
    request: CompareRequest,
    use_case: CompareAnalysesUseCase = Depends(get_compare_use_case),
) -> ComparisonResponse:
    """Joint versus independent bounds for every pair against the correct class."""
    net1, net2, sample = _networks_and_sample(request)
    run = await use_case.execute(
        net1, net2, [sample], request.delta, allow_misclassified=request.allow_misclassified
    )
    return ComparisonResponse(**run.to_dict())
