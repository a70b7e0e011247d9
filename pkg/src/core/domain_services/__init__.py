"""
Domain services for verification logic.

Pure synchronous computation over domain entities: network evaluation,
bound propagation, LP relaxation, compaction, reference oracles and the
implication verifier.
"""

from .bound_refinement import BoundRefiner
from .bounds import count_unstable, propagate_intervals, region_box
from .compaction import compaction_summary, prune_mbp, quantize, zero_count
from .model import (
    check_compatible,
    forward,
    forward_batch,
    layer_activations,
    log_pr,
    log_rpr,
    predict,
    require_compatible,
    softmax,
)
from .relax import RelaxOptions, build_joint_lp, build_network_lp, execution_point
from .verification import ImplicationVerifier, VerifierOptions

__all__ = [
    "BoundRefiner",
    "count_unstable", "propagate_intervals", "region_box",
    "compaction_summary", "prune_mbp", "quantize", "zero_count",
    "check_compatible", "forward", "forward_batch", "layer_activations",
    "log_pr", "log_rpr", "predict", "require_compatible", "softmax",
    "RelaxOptions", "build_joint_lp", "build_network_lp", "execution_point",
    "ImplicationVerifier", "VerifierOptions",
]
