"""
Core domain entities.

Immutable value objects for networks, regions, bounds, linear programs and
verification results. They depend only on numpy/scipy, never on outer layers.
"""

from .layer import LayerKind, LayerSpec
from .network import ClassPair, Network
from .region import InputRegion
from .bounds_map import BoundsMap, LayerBounds, NeuronPhase
from .linear_program import LinearProgram, NetworkRole, ProblemVariant, Relation, Stage, VarRef
from .lp_solution import LpSolution, LpStatus, SolutionCertificate
from .quantization import PruneScope, QuantKind, QuantScheme
from .verification import (
    ChainLink,
    ChainReport,
    ComparisonResult,
    ImplicationReport,
    PairBound,
    RobustnessReport,
    SampleOracleResult,
)

__all__ = [
    "LayerKind", "LayerSpec", "ClassPair", "Network", "InputRegion",
    "BoundsMap", "LayerBounds", "NeuronPhase",
    "LinearProgram", "NetworkRole", "ProblemVariant", "Relation", "Stage", "VarRef",
    "LpSolution", "LpStatus", "SolutionCertificate",
    "PruneScope", "QuantKind", "QuantScheme",
    "ChainLink", "ChainReport", "ComparisonResult", "ImplicationReport",
    "PairBound", "RobustnessReport", "SampleOracleResult",
]
