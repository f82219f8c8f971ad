"""Per-row penalized maximum likelihood on the nonnegative cone.

For a row pattern gamma_i the estimator minimizes

    nll_i(theta) - log v(theta)

over theta = (mu_i, alpha_i) with alpha_ij = 0 pinned for every masked j
and the free coordinates constrained to be nonnegative. Both supported
luckiness choices keep the objective convex: uniform adds nothing and the
exponential penalty adds a linear term (+1 per free coordinate).

The solver is projected gradient descent with a Barzilai-Borwein trial
step and Armijo backtracking, run by the active kernel backend.
Convergence means the projected-gradient sup-norm reached tol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend, likelihood
from .types import EventData, LuckinessSpec, RowPattern, ValidationError

# Deterministic default start: a baseline explaining half the counts plus a
# small offset so the start is strictly feasible even with zero events.
INIT_ALPHA = 0.01
INIT_MU_OFFSET = 1e-3


@dataclass(frozen=True)
class FitConfig:
    """Solver settings. tol bounds the projected-gradient sup-norm."""

    tol: float = 1e-8
    max_iter: int = 2000

    def __post_init__(self) -> None:
        if not (float(self.tol) > 0.0):
            raise ValidationError("tol must be > 0")
        if int(self.max_iter) < 1:
            raise ValidationError("max_iter must be >= 1")
        object.__setattr__(self, "tol", float(self.tol))
        object.__setattr__(self, "max_iter", int(self.max_iter))


@dataclass(frozen=True)
class FitResult:
    """Fitted row parameters and solver diagnostics.

    theta has length p + 1 (baseline first); masked coordinates are exactly
    zero. objective is nll - log v at theta.
    """

    theta: np.ndarray
    objective: float
    converged: bool
    iterations: int


def log_luckiness(luck: LuckinessSpec, theta: np.ndarray, pattern: RowPattern) -> float:
    """log v(theta) restricted to the free coordinates of the row."""
    if luck.kind == "uniform":
        return 0.0
    theta = np.asarray(theta, dtype=np.float64)
    mask = np.asarray(pattern, dtype=bool)
    if theta.shape != (mask.size + 1,):
        raise ValidationError("theta length does not match the pattern")
    return -(float(theta[0]) + float(theta[1:][mask].sum()))


def default_start(view: likelihood.DimensionView) -> np.ndarray:
    stats = view.stats
    w = int(view.mask.sum())
    x0 = np.empty(1 + w, dtype=np.float64)
    x0[0] = stats.n_events / (2.0 * stats.horizon) + INIT_MU_OFFSET
    x0[1:] = INIT_ALPHA
    return x0


def fit_view(view: likelihood.DimensionView, luck: LuckinessSpec,
             config: FitConfig = FitConfig(), x0: np.ndarray | None = None) -> FitResult:
    """Fit one row pattern given prebuilt statistics.

    The luckiness penalty folds into the linear part of the objective, so
    the kernel solver only ever sees lin . x - sum log(amat @ x).
    """
    amat, lin = likelihood.design_matrices(view)
    if luck.kind == "exp_penalty":
        lin = lin + 1.0
    if x0 is None:
        x0 = default_start(view)
    else:
        x0 = np.asarray(x0, dtype=np.float64)
        if x0.shape != lin.shape:
            raise ValidationError(f"x0 must have shape {lin.shape}")
    x, iters, converged = backend.fit_nonneg(amat, lin, x0, config.tol, config.max_iter)
    theta = likelihood.expand_theta(x, view.pattern)
    objective = likelihood.nll_dim(theta, view) - log_luckiness(luck, theta, view.pattern)
    return FitResult(theta=theta, objective=float(objective), converged=bool(converged), iterations=int(iters))


def mdl_fit(data: EventData, i: int, pattern: RowPattern, luck: LuckinessSpec,
            beta: np.ndarray, config: FitConfig = FitConfig(),
            x0: np.ndarray | None = None) -> FitResult:
    """Fit row i of the excitation matrix under the given pattern."""
    view = likelihood.DimensionView.build(data, i, pattern, beta)
    return fit_view(view, luck, config, x0=x0)


def objective_at(theta: np.ndarray, view: likelihood.DimensionView, luck: LuckinessSpec) -> float:
    """nll - log v at an arbitrary feasible theta (used for solver probes)."""
    value = likelihood.nll_dim(theta, view)
    if math.isinf(value):
        return value
    return value - log_luckiness(luck, theta, view.pattern)
