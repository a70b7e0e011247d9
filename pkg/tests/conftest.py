"""Shared fixtures for the implylp test suite."""

import numpy as np
import pytest

from src.core.domain_services.oracle import demo_networks
from src.core.domain_services.verification import ImplicationVerifier
from src.core.entities.layer import LayerSpec
from src.core.entities.network import Network
from src.infrastructure.config import get_settings
from src.infrastructure.solvers.revised_simplex import RevisedSimplexSolver


@pytest.fixture(autouse=True)
def fresh_settings():
    """Settings are cached per process; every test starts from the environment."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def solver():
    return RevisedSimplexSolver()


@pytest.fixture
def verifier(solver):
    return ImplicationVerifier(solver)


@pytest.fixture
def demo_pair():
    """(implied, implier) on the box [0.2, 0.8]^2."""
    return demo_networks()


@pytest.fixture
def small_dense():
    """2 -> 3 -> ReLU -> 2 network with hand-picked weights."""
    return Network(
        [
            LayerSpec.dense([[1.0, -1.0], [0.5, 0.5], [-1.0, 2.0]], [0.0, -0.25, 0.1]),
            LayerSpec.relu((3,)),
            LayerSpec.dense([[1.0, 0.0, -1.0], [0.0, 1.0, 1.0]], [0.2, -0.2]),
        ],
        name="small",
    )


@pytest.fixture
def small_conv():
    """4x4x1 image -> Conv2D(2x2, 2 filters) -> ReLU -> MaxPool(3) -> Flatten -> Dense(2)."""
    kernel = np.array(
        [
            [[[1.0, -0.5]], [[0.5, 0.25]]],
            [[[-0.25, 1.0]], [[0.75, -1.0]]],
        ]
    )
    return Network(
        [
            LayerSpec.conv2d((4, 4, 1), kernel, [0.1, -0.1]),
            LayerSpec.relu((3, 3, 2)),
            LayerSpec.max_pool2d((3, 3, 2), 3),
            LayerSpec.flatten((1, 1, 2)),
            LayerSpec.dense([[1.0, -1.0], [-0.5, 0.5]], [0.0, 0.05]),
        ],
        name="conv",
    )
