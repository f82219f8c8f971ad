"""Core data types for the Hawkes MDL toolkit.

Pure data containers plus their validation and JSON (de)serialization.
No numerics beyond invariant checks live here; estimation, simulation and
scoring code consumes these types but never mutates them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

# A row pattern is one row of an adjacency matrix, as a p-tuple of 0/1 ints.
# Tuples so patterns are hashable (cache keys, score tables).
RowPattern = tuple[int, ...]

LUCKINESS_KINDS = ("uniform", "exp_penalty")
GENERATIVE_SCENARIOS = ("default", "sparse")


class ValidationError(ValueError):
    """Raised when a value violates a structural invariant."""


def _frozen_array(obj, name: str, value: np.ndarray) -> None:
    value.flags.writeable = False
    object.__setattr__(obj, name, value)


def _check(cond: bool, message: str) -> None:
    if not cond:
        raise ValidationError(message)


@dataclass(frozen=True)
class EventData:
    """A finite multivariate point-process sample on the window [0, horizon].

    Attributes
    ----------
    horizon : float
        Observation window length T, strictly positive.
    events : tuple of numpy.ndarray
        One float64 array per dimension, each strictly increasing with all
        timestamps in [0, horizon] (closed at both ends). Empty arrays are
        valid: a dimension may have no events.
    """

    horizon: float
    events: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        horizon = float(self.horizon)
        _check(math.isfinite(horizon) and horizon > 0.0, "horizon must be finite and > 0")
        object.__setattr__(self, "horizon", horizon)
        _check(len(self.events) >= 1, "dimension count must be >= 1")
        frozen = []
        for i, seq in enumerate(self.events):
            arr = np.ascontiguousarray(seq, dtype=np.float64)
            _check(arr.ndim == 1, f"events[{i}] must be one dimensional")
            if arr.size:
                _check(bool(np.all(np.isfinite(arr))), f"events[{i}] contains a non-finite timestamp")
                _check(bool(np.all(np.diff(arr) > 0.0)), f"events[{i}] is not strictly increasing")
                _check(float(arr[0]) >= 0.0, f"events[{i}] has a negative timestamp")
                _check(float(arr[-1]) <= horizon, f"events[{i}] has a timestamp past the horizon")
            arr.flags.writeable = False
            frozen.append(arr)
        object.__setattr__(self, "events", tuple(frozen))

    @property
    def dim(self) -> int:
        return len(self.events)

    def counts(self) -> tuple[int, ...]:
        return tuple(int(a.size) for a in self.events)

    def to_json_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "dim": self.dim,
            "events": [a.tolist() for a in self.events],
        }

    @classmethod
    def from_json_dict(cls, raw: dict) -> "EventData":
        return validate_event_data(raw)


def validate_event_data(raw) -> EventData:
    """Validate a candidate event record and return the canonical form.

    Accepts an EventData instance (revalidated on construction) or a parsed
    JSON object with exactly the keys horizon, dim and events. The first
    violated invariant is reported.
    """
    if isinstance(raw, EventData):
        return EventData(horizon=raw.horizon, events=raw.events)
    if not isinstance(raw, dict):
        raise ValidationError(f"expected an object with horizon/dim/events, got {type(raw).__name__}")
    expected = {"horizon", "dim", "events"}
    extra = set(raw) - expected
    _check(not extra, f"unknown keys in event record: {sorted(extra)}")
    missing = expected - set(raw)
    _check(not missing, f"missing keys in event record: {sorted(missing)}")
    _check(isinstance(raw["dim"], int) and not isinstance(raw["dim"], bool), "dim must be an integer")
    _check(isinstance(raw["events"], list), "events must be a list of per-dimension lists")
    _check(len(raw["events"]) == raw["dim"], "dim does not match the number of event sequences")
    data = EventData(horizon=raw["horizon"], events=tuple(np.asarray(s, dtype=np.float64) for s in raw["events"]))
    return data


@dataclass(frozen=True)
class ExpMhpParams:
    """Parameters of an exponential-kernel multivariate Hawkes process.

    mu is the (p,) baseline vector, alpha the (p, p) excitation weight matrix
    and beta the (p, p) decay matrix. Entry (i, j) governs the influence of
    events in dimension j on the intensity of dimension i.
    """

    mu: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self) -> None:
        mu = np.ascontiguousarray(self.mu, dtype=np.float64)
        alpha = np.ascontiguousarray(self.alpha, dtype=np.float64)
        beta = np.ascontiguousarray(self.beta, dtype=np.float64)
        _check(mu.ndim == 1 and mu.size >= 1, "mu must be a vector of length >= 1")
        p = mu.size
        _check(alpha.shape == (p, p), f"alpha must have shape ({p}, {p})")
        _check(beta.shape == (p, p), f"beta must have shape ({p}, {p})")
        _check(bool(np.all(np.isfinite(mu))) and bool(np.all(mu >= 0.0)), "mu entries must be finite and >= 0")
        _check(bool(np.all(np.isfinite(alpha))) and bool(np.all(alpha >= 0.0)), "alpha entries must be finite and >= 0")
        _check(bool(np.all(np.isfinite(beta))) and bool(np.all(beta > 0.0)), "beta entries must be finite and > 0")
        _frozen_array(self, "mu", mu)
        _frozen_array(self, "alpha", alpha)
        _frozen_array(self, "beta", beta)

    @property
    def dim(self) -> int:
        return int(self.mu.size)

    def theta_row(self, i: int) -> np.ndarray:
        """Per-dimension parameter vector (mu_i, alpha_i1, ..., alpha_ip)."""
        return np.concatenate(([self.mu[i]], self.alpha[i]))

    def support(self) -> "Adjacency":
        return Adjacency(entries=(self.alpha > 0.0).astype(np.int8))

    def to_json_dict(self) -> dict:
        return {"mu": self.mu.tolist(), "alpha": self.alpha.tolist(), "beta": self.beta.tolist()}

    @classmethod
    def from_json_dict(cls, raw: dict) -> "ExpMhpParams":
        _check(isinstance(raw, dict), "parameter record must be an object")
        extra = set(raw) - {"mu", "alpha", "beta"}
        _check(not extra, f"unknown keys in parameter record: {sorted(extra)}")
        try:
            return cls(mu=np.asarray(raw["mu"]), alpha=np.asarray(raw["alpha"]), beta=np.asarray(raw["beta"]))
        except KeyError as exc:
            raise ValidationError(f"missing key in parameter record: {exc.args[0]}") from exc


@dataclass(frozen=True)
class Adjacency:
    """Binary p x p edge matrix; entry (i, j) = 1 means j excites i."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.ascontiguousarray(self.entries, dtype=np.int8)
        _check(entries.ndim == 2 and entries.shape[0] == entries.shape[1] and entries.shape[0] >= 1,
               "adjacency must be a square matrix of size >= 1")
        _check(bool(np.all((entries == 0) | (entries == 1))), "adjacency entries must be 0 or 1")
        _frozen_array(self, "entries", entries)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    def row(self, i: int) -> RowPattern:
        return tuple(int(b) for b in self.entries[i])

    def rows(self) -> tuple[RowPattern, ...]:
        return tuple(self.row(i) for i in range(self.dim))

    @classmethod
    def from_rows(cls, rows: Sequence[RowPattern]) -> "Adjacency":
        return cls(entries=np.asarray(rows, dtype=np.int8).reshape(len(rows), -1))

    def edge_count(self) -> int:
        return int(self.entries.sum())

    def to_json_dict(self) -> dict:
        return {"dim": self.dim, "rows": self.entries.tolist()}

    @classmethod
    def from_json_dict(cls, raw: dict) -> "Adjacency":
        _check(isinstance(raw, dict), "adjacency record must be an object")
        extra = set(raw) - {"dim", "rows"}
        _check(not extra, f"unknown keys in adjacency record: {sorted(extra)}")
        _check("dim" in raw and "rows" in raw, "adjacency record needs dim and rows")
        adj = cls(entries=np.asarray(raw["rows"], dtype=np.int8))
        _check(adj.dim == raw["dim"], "dim does not match the row count")
        return adj


def pattern_mask(pattern: RowPattern) -> np.ndarray:
    """Boolean mask of free alpha coordinates for one row pattern."""
    mask = np.asarray(pattern, dtype=bool)
    if mask.ndim != 1 or mask.size < 1:
        raise ValidationError("row pattern must be a non-empty bit vector")
    return mask


@dataclass(frozen=True)
class LuckinessSpec:
    """Choice of luckiness weighting v(theta) used inside the MDL objective.

    kind "uniform" is v = 1 (log v = 0). kind "exp_penalty" is the separable
    exponential tilt with log v(theta_i) = -mu_i - sum of the free alpha
    coordinates, which keeps the per-row objective convex.
    """

    kind: str = "uniform"

    def __post_init__(self) -> None:
        _check(self.kind in LUCKINESS_KINDS, f"unknown luckiness kind: {self.kind!r}")

    def to_json_dict(self) -> dict:
        return {"kind": self.kind}

    @classmethod
    def from_json_dict(cls, raw) -> "LuckinessSpec":
        if isinstance(raw, str):
            return cls(kind=raw)
        _check(isinstance(raw, dict) and set(raw) == {"kind"}, "luckiness record must be {'kind': ...}")
        return cls(kind=raw["kind"])


@dataclass(frozen=True)
class ModelPrior:
    """Per-dimension prior over row patterns. Only the uniform prior is
    implemented: pi_i(gamma) = 1 / |Gamma_i| over the admissible set."""

    kind: str = "uniform"

    def __post_init__(self) -> None:
        _check(self.kind == "uniform", f"unknown model prior kind: {self.kind!r}")

    def neg_log(self, pattern: RowPattern, space_size: int) -> float:
        _check(space_size >= 1, "model space must be non-empty")
        return math.log(space_size)

    def to_json_dict(self) -> dict:
        return {"kind": self.kind}

    @classmethod
    def from_json_dict(cls, raw) -> "ModelPrior":
        if isinstance(raw, str):
            return cls(kind=raw)
        _check(isinstance(raw, dict) and set(raw) == {"kind"}, "model prior record must be {'kind': ...}")
        return cls(kind=raw["kind"])


@dataclass(frozen=True)
class GenerativePrior:
    """Distribution over ground-truth graphs and parameters.

    scenario "default" draws each cross edge independently with probability
    edge_prob. scenario "sparse" draws, per row, an in-degree uniform on
    {0, ..., max_in_degree} and then a uniform subset of that size among the
    other dimensions. self_excite pins every diagonal entry to 1; with it
    off the diagonal is left empty.

    Edge weights are uniform on alpha_range, baselines uniform on mu_range.
    beta is either a positive scalar (constant decay matrix) or a full
    positive matrix, fixed and known.
    """

    scenario: str = "default"
    edge_prob: float = 0.3
    max_in_degree: int = 1
    alpha_range: tuple[float, float] = (0.1, 0.2)
    mu_range: tuple[float, float] = (0.5, 1.0)
    beta: float | np.ndarray = 1.0
    self_excite: bool = True

    def __post_init__(self) -> None:
        _check(self.scenario in GENERATIVE_SCENARIOS, f"unknown scenario: {self.scenario!r}")
        _check(0.0 <= float(self.edge_prob) <= 1.0, "edge_prob must lie in [0, 1]")
        _check(int(self.max_in_degree) >= 0, "max_in_degree must be >= 0")
        object.__setattr__(self, "edge_prob", float(self.edge_prob))
        object.__setattr__(self, "max_in_degree", int(self.max_in_degree))
        for name in ("alpha_range", "mu_range"):
            lo, hi = (float(v) for v in getattr(self, name))
            _check(math.isfinite(lo) and math.isfinite(hi), f"{name} bounds must be finite")
            _check(0.0 <= lo <= hi, f"{name} must satisfy 0 <= low <= high")
            object.__setattr__(self, name, (lo, hi))
        if np.ndim(self.beta) == 0:
            b = float(self.beta)
            _check(math.isfinite(b) and b > 0.0, "beta must be > 0")
            object.__setattr__(self, "beta", b)
        else:
            b = np.ascontiguousarray(self.beta, dtype=np.float64)
            _check(b.ndim == 2 and b.shape[0] == b.shape[1], "matrix beta must be square")
            _check(bool(np.all(np.isfinite(b))) and bool(np.all(b > 0.0)), "beta entries must be > 0")
            _frozen_array(self, "beta", b)

    def beta_matrix(self, p: int) -> np.ndarray:
        """Materialize the (p, p) decay matrix for dimension count p."""
        if np.ndim(self.beta) == 0:
            return np.full((p, p), float(self.beta))
        _check(self.beta.shape == (p, p), f"beta matrix has shape {self.beta.shape}, expected ({p}, {p})")
        return np.asarray(self.beta)

    def to_json_dict(self) -> dict:
        out = {
            "scenario": self.scenario,
            "alpha_range": list(self.alpha_range),
            "mu_range": list(self.mu_range),
            "beta": self.beta if np.ndim(self.beta) == 0 else np.asarray(self.beta).tolist(),
            "self_excite": self.self_excite,
        }
        if self.scenario == "default":
            out["edge_prob"] = self.edge_prob
        else:
            out["max_in_degree"] = self.max_in_degree
        return out

    @classmethod
    def from_json_dict(cls, raw: dict) -> "GenerativePrior":
        _check(isinstance(raw, dict), "generative prior record must be an object")
        allowed = {"scenario", "edge_prob", "max_in_degree", "alpha_range", "mu_range", "beta", "self_excite"}
        extra = set(raw) - allowed
        _check(not extra, f"unknown keys in generative prior: {sorted(extra)}")
        kwargs = dict(raw)
        if "beta" in kwargs and isinstance(kwargs["beta"], list):
            kwargs["beta"] = np.asarray(kwargs["beta"], dtype=np.float64)
        for name in ("alpha_range", "mu_range"):
            if name in kwargs:
                rng = kwargs[name]
                _check(isinstance(rng, (list, tuple)) and len(rng) == 2, f"{name} must be a [low, high] pair")
                kwargs[name] = (float(rng[0]), float(rng[1]))
        return cls(**kwargs)


@dataclass(frozen=True)
class ComplexityEstimate:
    """Monte-Carlo estimate of one row's model complexity term.

    comp is the log-mean of the importance weights Q_k, stderr the
    delta-method standard error of comp, n_samples the Monte-Carlo size.
    log_q optionally retains the per-sample log Q values (length n_samples).
    """

    comp: float
    stderr: float
    n_samples: int
    log_q: np.ndarray | None = None

    def __post_init__(self) -> None:
        _check(math.isfinite(float(self.comp)), "comp must be finite")
        _check(float(self.stderr) >= 0.0, "stderr must be >= 0")
        _check(int(self.n_samples) >= 1, "n_samples must be >= 1")
        object.__setattr__(self, "comp", float(self.comp))
        object.__setattr__(self, "stderr", float(self.stderr))
        object.__setattr__(self, "n_samples", int(self.n_samples))
        if self.log_q is not None:
            lq = np.ascontiguousarray(self.log_q, dtype=np.float64)
            _check(lq.shape == (self.n_samples,), "log_q must have length n_samples")
            _frozen_array(self, "log_q", lq)


@dataclass(frozen=True)
class MdlScore:
    """Additive decomposition of one row's MDL objective.

    total is always the exact float sum of the four parts, in the fixed
    order prior + likelihood + luckiness + complexity. A fit that failed to
    converge is flagged and carries an infinite likelihood part so it can
    never win a model comparison.
    """

    neg_log_prior: float
    neg_log_lik: float
    neg_log_luck: float
    comp: float
    converged: bool = True

    @property
    def total(self) -> float:
        return self.neg_log_prior + self.neg_log_lik + self.neg_log_luck + self.comp

    def to_json_dict(self) -> dict:
        return {
            "neg_log_prior": self.neg_log_prior,
            "neg_log_lik": self.neg_log_lik,
            "neg_log_luck": self.neg_log_luck,
            "comp": self.comp,
            "total": self.total,
            "converged": self.converged,
        }
