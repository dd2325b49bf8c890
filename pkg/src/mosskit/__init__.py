"""Weighted-sampling estimation of 4- and 5-node graphlet frequencies."""

__version__ = "0.1.0"

from .catalog import MotifCatalog, build_catalog
from .errors import (ConfigError, EmptyGraphError, GraphParseError,
                     InapplicableMethodError, MosskitError, ScaleCapError,
                     WeightOverflowError)
from .estimators import (EstimateReport, confidence_interval, estimate_moss4,
                         estimate_moss4min, estimate_moss5, estimate_single5,
                         mix_estimates, plan_budget)
from .graph import Graph, TotalOrder, build_total_order, load_edge_list
from .oracle import ExactCounts, count_noninduced_patterns, enumerate_cis
from .rng import TapeRecorder, Xoshiro256, derive_stream_seed
from .samplers import Tally, run_partitioned, run_sampler
from .vertexsim import SuperstepEngine, run_vertex_sampler
from .weights import WeightIndex, build_weight_index

__all__ = [
    "MotifCatalog", "build_catalog",
    "MosskitError", "GraphParseError", "EmptyGraphError", "WeightOverflowError",
    "InapplicableMethodError", "ScaleCapError", "ConfigError",
    "EstimateReport", "confidence_interval", "estimate_moss4",
    "estimate_moss4min", "estimate_moss5", "estimate_single5",
    "mix_estimates", "plan_budget",
    "Graph", "TotalOrder", "build_total_order", "load_edge_list",
    "ExactCounts", "count_noninduced_patterns", "enumerate_cis",
    "TapeRecorder", "Xoshiro256", "derive_stream_seed",
    "Tally", "run_partitioned", "run_sampler",
    "SuperstepEngine", "run_vertex_sampler",
    "WeightIndex", "build_weight_index",
    "__version__",
]
