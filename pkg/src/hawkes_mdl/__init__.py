"""Granger-causal graph discovery for exponential-kernel Hawkes processes.

The package simulates multivariate Hawkes processes, evaluates their exact
likelihood, and selects the excitation graph by minimizing a per-dimension
MDL score whose model-complexity term is estimated by Monte Carlo and kept
in a disk cache. Hot kernels run in a compiled extension when available,
with a pure-Python mirror selected automatically at import.
"""

__version__ = "0.1.0"

from . import backend
from .complexity import (ComplexityCache, ComplexityJobConfig, ComplexityJobError,
                         CacheKey, CacheMissError, estimate_comp, precompute_cache)
from .discovery import ModelSpace, discover, mdl_objective_dim, self_loop_space
from .estimator import FitConfig, FitResult, log_luckiness, mdl_fit
from .evaluation import (BenchmarkConfig, BenchmarkResult, f1, random_baseline_f1,
                         run_benchmark)
from .ingest import SeriesData, read_series_csv, shocks_from_series
from .likelihood import (DimensionStats, DimensionView, intensity, nll_dim,
                         nll_grad_dim, nll_total)
from .seeding import SeedSpec
from .simulation import SimulationError, draw_graph, draw_params, simulate
from .types import (Adjacency, ComplexityEstimate, EventData, ExpMhpParams,
                    GenerativePrior, LuckinessSpec, MdlScore, ModelPrior,
                    RowPattern, ValidationError, validate_event_data)

__all__ = [
    "Adjacency", "BenchmarkConfig", "BenchmarkResult", "CacheKey", "CacheMissError",
    "ComplexityCache", "ComplexityEstimate", "ComplexityJobConfig", "ComplexityJobError",
    "DimensionStats", "DimensionView", "EventData", "ExpMhpParams", "FitConfig",
    "FitResult", "GenerativePrior", "LuckinessSpec", "MdlScore", "ModelPrior",
    "ModelSpace", "RowPattern", "SeedSpec", "SeriesData", "SimulationError",
    "ValidationError", "backend", "discover", "draw_graph", "draw_params",
    "estimate_comp", "f1", "intensity", "log_luckiness", "mdl_fit",
    "mdl_objective_dim", "nll_dim", "nll_grad_dim", "nll_total", "precompute_cache",
    "random_baseline_f1", "read_series_csv", "run_benchmark", "self_loop_space",
    "shocks_from_series", "simulate", "validate_event_data",
]
