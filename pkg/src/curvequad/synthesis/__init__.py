"""Rule construction: pullback of Gaussian rules, pruning, penalized solvers."""

from .common import IntervalCount, KKTReport, NLPConfig, SynthesisResult, merge_nodes, pullback_values
from .kkt import kkt_analyze
from .nlp import nlp_plane, nlp_rational, penalty_h
from .prune import caratheodory_prune, discretize_parameter_measure, prune_weights
from .pullback import moment_residual, pullback_gauss

__all__ = [
    "IntervalCount",
    "KKTReport",
    "NLPConfig",
    "SynthesisResult",
    "caratheodory_prune",
    "discretize_parameter_measure",
    "kkt_analyze",
    "merge_nodes",
    "moment_residual",
    "nlp_plane",
    "nlp_rational",
    "penalty_h",
    "prune_weights",
    "pullback_gauss",
    "pullback_values",
]
