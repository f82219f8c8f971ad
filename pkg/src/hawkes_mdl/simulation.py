"""Sampling of ground-truth models and event data.

draw_graph and draw_params realize the generative prior; simulate runs the
thinning sampler from the active kernel backend. All randomness flows
through SeedSpec streams, so every draw is reproducible from the master
seed and a path, independent of threading or call order.
"""

from __future__ import annotations

import numpy as np

from . import backend
from .seeding import SeedSpec
from .types import Adjacency, EventData, ExpMhpParams, GenerativePrior, ValidationError

# Hard safety cap on total accepted events per simulation.
MAX_EVENTS = 10_000_000


class SimulationError(RuntimeError):
    """Raised for non-stationary inputs or runaway event counts."""


def draw_graph(prior: GenerativePrior, p: int, seed: SeedSpec) -> Adjacency:
    """Draw a ground-truth adjacency matrix.

    default scenario: each off-diagonal entry is an independent
    Bernoulli(edge_prob). sparse scenario: each row gets an in-degree
    uniform on {0, ..., max_in_degree} and then a uniform subset of that
    size among the other dimensions. The diagonal is all ones when
    self_excite is set and all zeros otherwise.
    """
    if p < 1:
        raise ValidationError("dimension count must be >= 1")
    gen = seed.generator()
    entries = np.zeros((p, p), dtype=np.int8)
    if prior.scenario == "default":
        draws = gen.random((p, p))
        entries[draws < prior.edge_prob] = 1
    else:
        m = prior.max_in_degree
        if m >= p:
            raise ValidationError(f"max_in_degree {m} must be < p={p}")
        for i in range(p):
            k = int(gen.integers(0, m + 1))
            others = np.array([j for j in range(p) if j != i], dtype=np.int64)
            chosen = gen.choice(others, size=k, replace=False)
            entries[i, chosen] = 1
    for i in range(p):
        entries[i, i] = 1 if prior.self_excite else 0
    return Adjacency(entries=entries)


def draw_params(prior: GenerativePrior, graph: Adjacency, seed: SeedSpec) -> ExpMhpParams:
    """Draw parameters supported on the graph.

    Baselines are uniform on mu_range; each present edge gets a weight
    uniform on alpha_range (absent edges are exactly zero). The decay
    matrix comes from the prior and is treated as known. Draw order is
    fixed: baselines first, then weights row-major over present edges.
    """
    p = graph.dim
    gen = seed.generator()
    mu = gen.uniform(prior.mu_range[0], prior.mu_range[1], size=p)
    alpha = np.zeros((p, p), dtype=np.float64)
    lo, hi = prior.alpha_range
    for i in range(p):
        for j in range(p):
            if graph.entries[i, j]:
                alpha[i, j] = gen.uniform(lo, hi)
    return ExpMhpParams(mu=mu, alpha=alpha, beta=prior.beta_matrix(p))


def branching_matrix(params: ExpMhpParams) -> np.ndarray:
    """Expected offspring counts: entry (i, j) is alpha_ij / beta_ij."""
    return params.alpha / params.beta


def spectral_radius(params: ExpMhpParams) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(branching_matrix(params)))))


def simulate(params: ExpMhpParams, horizon: float, seed: SeedSpec,
             max_events: int = MAX_EVENTS) -> EventData:
    """Sample the process on [0, horizon] by thinning.

    Rejects non-stationary parameters (branching-matrix spectral radius
    >= 1) up front and aborts if the event count exceeds max_events.
    An event landing exactly on the horizon is kept: the observation
    window is closed.
    """
    horizon = float(horizon)
    if not horizon > 0.0:
        raise ValidationError("horizon must be > 0")
    rho = spectral_radius(params)
    if rho >= 1.0:
        raise SimulationError(f"non-stationary parameters: branching spectral radius {rho:.6g} >= 1")
    gen = seed.generator()
    try:
        times, ids = backend.simulate_thinning(params.mu, params.alpha, params.beta,
                                               horizon, gen, int(max_events))
    except RuntimeError as exc:
        raise SimulationError(str(exc)) from exc
    p = params.dim
    per_dim: list[list[float]] = [[] for _ in range(p)]
    for t, d in zip(times, ids):
        per_dim[int(d)].append(float(t))
    return EventData(horizon=horizon, events=tuple(np.asarray(s, dtype=np.float64) for s in per_dim))
