"""FastAPI application entry point."""

import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from src import __version__
from src.adapters.api.routes import health, verification
from src.adapters.api.schemas.responses import ErrorResponse
from src.core.exceptions import ImplyLPError
from src.core.interfaces.network_repository import NetworkLoadError

logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Application lifespan management."""
    logger.info("Starting implylp API...")
    yield
    logger.info("Shutting down implylp API...")


app = FastAPI(
    title="implylp API",
    description="Certifies that one neural network classifies correctly wherever another one does",
    version=__version__,
    docs_url="/docs",
    redoc_url="/redoc",
    lifespan=lifespan
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(health.router)
app.include_router(verification.router)


@app.exception_handler(ImplyLPError)
async def domain_exception_handler(request: Request, exc: ImplyLPError) -> JSONResponse:
    """Invalid networks, regions or class indices."""
    return JSONResponse(
        status_code=400,
        content=ErrorResponse(error=type(exc).__name__, detail=str(exc)).model_dump()
    )


@app.exception_handler(NetworkLoadError)
async def network_exception_handler(request: Request, exc: NetworkLoadError) -> JSONResponse:
    """Inline network documents that fail validation."""
    return JSONResponse(
        status_code=400,
        content=ErrorResponse(error="Invalid network", detail=str(exc)).model_dump()
    )


@app.exception_handler(Exception)
async def global_exception_handler(request: Request, exc: Exception) -> JSONResponse:
    """Global exception handler."""
    logger.error(f"Unhandled error on {request.url.path}: {exc}")
    return JSONResponse(
        status_code=500,
        content=ErrorResponse(
            error="Internal Server Error",
            detail=str(exc)
        ).model_dump()
    )


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
