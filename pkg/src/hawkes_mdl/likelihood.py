"""Exact log-likelihood for exponential-kernel Hawkes processes.

The per-dimension negative log-likelihood has the closed form

    nll_i = mu_i * T
          + sum_j (alpha_ij / beta_ij) * sum_k (1 - exp(-beta_ij * (T - t_jk)))
          - sum_l log(mu_i + sum_j alpha_ij * H_i[l, j])

where H_i[l, j] = sum over t_jk < t_il of exp(-beta_ij * (t_il - t_jk)) is
the decayed count of strictly earlier source events. H depends on the data
and the (known) decay matrix only, so it is computed once per dimension and
reused across every row pattern and every optimizer iteration. In theta the
function mu_i * T + alpha . c - sum log(linear) is convex on its domain.

By convention the nll is +inf whenever some observed event sits at a point
of zero intensity: such a parameter explains the data infinitely badly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .types import EventData, ExpMhpParams, RowPattern, ValidationError, pattern_mask


@dataclass(frozen=True)
class DimensionStats:
    """Sufficient statistics of one target dimension.

    history has shape (n_i, p): column j holds the decayed count of earlier
    dimension-j events at each target event. comp_coef[j] is the integrated
    kernel mass (1 / beta_ij) * sum_k (1 - exp(-beta_ij * (T - t_jk))), the
    coefficient of alpha_ij in the compensator.
    """

    index: int
    horizon: float
    n_events: int
    history: np.ndarray
    comp_coef: np.ndarray

    @classmethod
    def build(cls, data: EventData, i: int, beta: np.ndarray) -> "DimensionStats":
        p = data.dim
        if not 0 <= i < p:
            raise ValidationError(f"dimension index {i} out of range for p={p}")
        beta = np.asarray(beta, dtype=np.float64)
        if beta.shape != (p, p):
            raise ValidationError(f"beta must have shape ({p}, {p})")
        target = data.events[i]
        n = int(target.size)
        history = np.empty((n, p), dtype=np.float64)
        comp_coef = np.empty(p, dtype=np.float64)
        for j in range(p):
            b = float(beta[i, j])
            if not (math.isfinite(b) and b > 0.0):
                raise ValidationError("beta entries must be finite and > 0")
            history[:, j] = backend.decay_history(target, data.events[j], b)
            comp_coef[j] = backend.interval_decay_sum(data.events[j], b, data.horizon) / b
        history.flags.writeable = False
        comp_coef.flags.writeable = False
        return cls(index=i, horizon=float(data.horizon), n_events=n, history=history, comp_coef=comp_coef)

    @property
    def dim(self) -> int:
        return int(self.comp_coef.size)


@dataclass(frozen=True)
class DimensionView:
    """One dimension's statistics together with an active row pattern."""

    stats: DimensionStats
    pattern: RowPattern

    def __post_init__(self) -> None:
        if len(self.pattern) != self.stats.dim:
            raise ValidationError("row pattern length does not match the dimension count")
        object.__setattr__(self, "pattern", tuple(int(b) for b in self.pattern))
        if any(b not in (0, 1) for b in self.pattern):
            raise ValidationError("row pattern bits must be 0 or 1")

    @property
    def mask(self) -> np.ndarray:
        return pattern_mask(self.pattern)

    @classmethod
    def build(cls, data: EventData, i: int, pattern: RowPattern, beta: np.ndarray) -> "DimensionView":
        return cls(stats=DimensionStats.build(data, i, beta), pattern=pattern)


def full_view(data: EventData, i: int, beta: np.ndarray) -> DimensionView:
    """View with every source dimension free."""
    return DimensionView.build(data, i, (1,) * data.dim, beta)


def _check_theta(theta: np.ndarray, view: DimensionView) -> np.ndarray:
    theta = np.asarray(theta, dtype=np.float64)
    p = view.stats.dim
    if theta.shape != (p + 1,):
        raise ValidationError(f"theta must have shape ({p + 1},): baseline plus one weight per source")
    if not np.all(np.isfinite(theta)) or np.any(theta < 0.0):
        raise ValidationError("theta entries must be finite and >= 0")
    if np.any(theta[1:][~view.mask] != 0.0):
        raise ValidationError("masked alpha coordinates must be exactly zero")
    return theta


def intensity(params: ExpMhpParams, data: EventData, i: int, t: float) -> float:
    """Conditional intensity of dimension i at time t given history before t.

    Only events strictly before t contribute; an event at exactly t is part
    of the future from the intensity's point of view.
    """
    if not 0 <= i < params.dim:
        raise ValidationError(f"dimension index {i} out of range")
    lam = float(params.mu[i])
    for j in range(params.dim):
        earlier = data.events[j]
        earlier = earlier[earlier < t]
        if earlier.size:
            lam += float(params.alpha[i, j]) * float(np.sum(np.exp(-params.beta[i, j] * (t - earlier))))
    return lam


def nll_dim(theta: np.ndarray, view: DimensionView) -> float:
    """Per-dimension negative log-likelihood at theta = (mu_i, alpha_i row).

    Masked coordinates must be zero. Returns +inf when an observed event has
    zero intensity under theta.
    """
    theta = _check_theta(theta, view)
    stats = view.stats
    mu = float(theta[0])
    alpha = theta[1:]
    value = mu * stats.horizon + float(alpha @ stats.comp_coef)
    if stats.n_events:
        lam = mu + stats.history @ alpha
        if float(lam.min()) <= 0.0:
            return math.inf
        value -= float(np.sum(np.log(lam)))
    return value


def nll_grad_dim(theta: np.ndarray, view: DimensionView) -> np.ndarray:
    """Gradient of nll_dim over the free coordinates.

    Layout: entry 0 is the baseline derivative, then one entry per free
    source dimension in ascending order. Requires strictly positive
    intensity at every target event.
    """
    theta = _check_theta(theta, view)
    stats = view.stats
    mask = view.mask
    mu = float(theta[0])
    alpha = theta[1:]
    if stats.n_events:
        lam = mu + stats.history @ alpha
        if float(lam.min()) <= 0.0:
            raise ValidationError("theta is on the likelihood barrier: some event has zero intensity")
        inv = 1.0 / lam
        d_mu = stats.horizon - float(inv.sum())
        d_alpha = stats.comp_coef[mask] - stats.history[:, mask].T @ inv
    else:
        d_mu = stats.horizon
        d_alpha = stats.comp_coef[mask].copy()
    return np.concatenate(([d_mu], d_alpha))


def nll_total(params: ExpMhpParams, data: EventData) -> float:
    """Joint negative log-likelihood, the sum of the per-dimension terms."""
    if params.dim != data.dim:
        raise ValidationError("parameter and data dimension counts differ")
    total = 0.0
    for i in range(params.dim):
        view = full_view(data, i, params.beta)
        total += nll_dim(params.theta_row(i), view)
    return total


def design_matrices(view: DimensionView) -> tuple[np.ndarray, np.ndarray]:
    """Reduced design for the free coordinates of one row.

    Returns (amat, lin) with amat of shape (n_i, 1 + w): a leading column of
    ones for the baseline, then the history columns of the free sources.
    lin = (T, comp_coef restricted to free sources). The row objective is
    lin . x - sum log(amat @ x) for x = (mu_i, free alphas).
    """
    stats = view.stats
    mask = view.mask
    n = stats.n_events
    amat = np.empty((n, 1 + int(mask.sum())), dtype=np.float64)
    amat[:, 0] = 1.0
    amat[:, 1:] = stats.history[:, mask]
    lin = np.concatenate(([stats.horizon], stats.comp_coef[mask]))
    return amat, lin


def expand_theta(x: np.ndarray, pattern: RowPattern) -> np.ndarray:
    """Inverse of the free-coordinate reduction: masked alphas are exactly 0."""
    mask = pattern_mask(pattern)
    theta = np.zeros(1 + mask.size, dtype=np.float64)
    theta[0] = x[0]
    theta[1:][mask] = x[1:]
    return theta
