"""Monte-Carlo estimation of per-row model complexity, with a disk cache.

The complexity of a row pattern is log E[Q] under the generative prior,
where for each synthetic dataset Q = exp(-fitted objective) / exp(-true
nll): the fitted penalized likelihood of the pattern measured against the
likelihood of the parameters that generated the data. The estimate is a
log-mean-exp over n_samples draws; its standard error comes from the
delta method on the sample variance of Q.

All patterns and dimensions share the same synthetic datasets (common
random numbers): sample k is derived from the master seed and k alone.
This makes estimates comparable across nested patterns sample by sample
and lets one precompute pass amortize simulation over the whole model
space. estimate_comp and precompute_cache run the identical code path, so
their values agree exactly.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import likelihood
from .estimator import FitConfig, fit_view, log_luckiness, objective_at
from .parallel import map_ordered
from .seeding import SeedSpec
from .simulation import draw_graph, draw_params, simulate
from .types import (ComplexityEstimate, EventData, GenerativePrior, LuckinessSpec,
                    ModelPrior, RowPattern, ValidationError)

log = logging.getLogger(__name__)

SCHEMA_VERSION = "1"

# Path namespace for Monte-Carlo samples (see seeding module conventions).
_SAMPLE_NS = 0
_ROLE_GRAPH = 0
_ROLE_PARAMS = 1
_ROLE_EVENTS = 2

# A fit counts as failed if it did not converge or its objective exceeds the
# value at the projected generating parameters by more than this slack.
OPTIMALITY_SLACK = 1e-6

# Fraction of failed fits above which the whole job is rejected.
MAX_FAILURE_FRACTION = 0.01


class ComplexityJobError(RuntimeError):
    """Raised when too many inner fits fail to converge."""


class CacheMissError(LookupError):
    """Raised when required cache entries are absent; carries every missing key."""

    def __init__(self, missing: Sequence["CacheKey"]):
        self.missing = tuple(missing)
        preview = ", ".join(k.short() for k in self.missing[:8])
        more = "" if len(self.missing) <= 8 else f" and {len(self.missing) - 8} more"
        super().__init__(f"{len(self.missing)} complexity cache entries missing: {preview}{more}")


def _digest(obj) -> str:
    payload = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class ComplexityJobConfig:
    """Everything that determines a batch of complexity estimates."""

    dim: int
    horizon: float
    gen_prior: GenerativePrior
    luckiness: LuckinessSpec = LuckinessSpec("uniform")
    model_prior: ModelPrior = ModelPrior("uniform")
    n_samples: int = 1000
    master_seed: int = 0
    fit: FitConfig = field(default_factory=FitConfig)

    def __post_init__(self) -> None:
        if int(self.dim) < 1:
            raise ValidationError("dim must be >= 1")
        if not float(self.horizon) > 0.0:
            raise ValidationError("horizon must be > 0")
        if int(self.n_samples) < 1:
            raise ValidationError("n_samples must be >= 1")
        if self.gen_prior.mu_range[0] <= 0.0:
            raise ValidationError("generative mu_range must be bounded away from zero")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "horizon", float(self.horizon))
        object.__setattr__(self, "n_samples", int(self.n_samples))
        object.__setattr__(self, "master_seed", int(self.master_seed))
        self.beta_matrix()

    def beta_matrix(self) -> np.ndarray:
        return self.gen_prior.beta_matrix(self.dim)

    def root_seed(self) -> SeedSpec:
        return SeedSpec(self.master_seed)

    def key(self, i: int, pattern: RowPattern) -> "CacheKey":
        if not 0 <= i < self.dim:
            raise ValidationError(f"dimension index {i} out of range")
        if len(pattern) != self.dim:
            raise ValidationError("pattern length does not match dim")
        return CacheKey(
            schema=SCHEMA_VERSION,
            dim=self.dim,
            horizon=self.horizon,
            beta_digest=_digest(self.beta_matrix().tolist()),
            prior_digest=_digest(self.gen_prior.to_json_dict()),
            luckiness=self.luckiness.kind,
            model_prior=self.model_prior.kind,
            n_samples=self.n_samples,
            master_seed=self.master_seed,
            index=int(i),
            pattern=tuple(int(b) for b in pattern),
        )


@dataclass(frozen=True)
class CacheKey:
    """Identity of one cached estimate; any field change invalidates it."""

    schema: str
    dim: int
    horizon: float
    beta_digest: str
    prior_digest: str
    luckiness: str
    model_prior: str
    n_samples: int
    master_seed: int
    index: int
    pattern: RowPattern

    def to_json_dict(self) -> dict:
        out = dict(self.__dict__)
        out["pattern"] = list(self.pattern)
        return out

    @classmethod
    def from_json_dict(cls, raw: dict) -> "CacheKey":
        data = dict(raw)
        data["pattern"] = tuple(int(b) for b in data["pattern"])
        return cls(**data)

    def short(self) -> str:
        bits = "".join(str(b) for b in self.pattern)
        return f"(dim {self.index}, pattern {bits})"


class ComplexityCache:
    """In-memory estimate store with JSON-lines persistence.

    One record per line: {"key": {...}, "comp": c, "stderr": s, "n": n}.
    Files are append-only; loading tolerates a partially written final line
    so an interrupted run can resume from everything written so far.
    """

    def __init__(self) -> None:
        self._entries: dict[CacheKey, ComplexityEstimate] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: CacheKey) -> bool:
        return key in self._entries

    def get(self, key: CacheKey) -> ComplexityEstimate | None:
        return self._entries.get(key)

    def put(self, key: CacheKey, est: ComplexityEstimate) -> None:
        self._entries[key] = est

    def items(self):
        return self._entries.items()

    @staticmethod
    def record(key: CacheKey, est: ComplexityEstimate) -> str:
        return json.dumps({"key": key.to_json_dict(), "comp": est.comp,
                           "stderr": est.stderr, "n": est.n_samples}, sort_keys=True)

    @classmethod
    def load(cls, path: str) -> "ComplexityCache":
        cache = cls()
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    raw = json.loads(line)
                    key = CacheKey.from_json_dict(raw["key"])
                    est = ComplexityEstimate(comp=raw["comp"], stderr=raw["stderr"], n_samples=raw["n"])
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    log.warning("skipping unreadable cache line %d in %s: %s", lineno, path, exc)
                    continue
                cache.put(key, est)
        return cache

    def append_to(self, path: str, entries: Iterable[tuple[CacheKey, ComplexityEstimate]]) -> int:
        written = 0
        with open(path, "a", encoding="utf-8") as fh:
            for key, est in entries:
                fh.write(self.record(key, est) + "\n")
                written += 1
            fh.flush()
            os.fsync(fh.fileno())
        return written


def _log_mean_exp_estimate(log_q: np.ndarray, keep_log_q: bool) -> ComplexityEstimate:
    n = int(log_q.size)
    shift = float(log_q.max())
    q = np.exp(log_q - shift)
    mean_q = float(q.mean())
    comp = shift + math.log(mean_q)
    if n == 1:
        stderr = 0.0
    else:
        sd = float(q.std(ddof=1))
        stderr = sd / (mean_q * math.sqrt(n))
    return ComplexityEstimate(comp=comp, stderr=stderr, n_samples=n,
                              log_q=log_q if keep_log_q else None)


def _sample_log_q(cfg: ComplexityJobConfig, k: int,
                  wanted: Mapping[int, Sequence[RowPattern]]):
    """Synthetic draw k and the per-(dimension, pattern) log Q values.

    Returns ({(i, pattern): log_q}, failed_fit_count). The draw depends on
    the master seed and k only, never on which patterns are requested.
    """
    root = cfg.root_seed()
    graph = draw_graph(cfg.gen_prior, cfg.dim, root.child(_SAMPLE_NS, k, _ROLE_GRAPH))
    z_params = draw_params(cfg.gen_prior, graph, root.child(_SAMPLE_NS, k, _ROLE_PARAMS))
    data = simulate(z_params, cfg.horizon, root.child(_SAMPLE_NS, k, _ROLE_EVENTS))
    beta = cfg.beta_matrix()
    out: dict[tuple[int, RowPattern], float] = {}
    failed = 0
    for i in sorted(wanted):
        stats = likelihood.DimensionStats.build(data, i, beta)
        z_theta = z_params.theta_row(i)
        view_all = likelihood.DimensionView(stats=stats, pattern=(1,) * cfg.dim)
        nll_z = likelihood.nll_dim(z_theta, view_all)
        for pattern in wanted[i]:
            view = likelihood.DimensionView(stats=stats, pattern=pattern)
            fit = fit_view(view, cfg.luckiness, cfg.fit)
            projected = z_theta.copy()
            projected[1:][~view.mask] = 0.0
            probe = objective_at(projected, view, cfg.luckiness)
            if not fit.converged or fit.objective > probe + OPTIMALITY_SLACK:
                failed += 1
                log.debug("fit failure at sample %d dim %d pattern %s", k, i, pattern)
            out[(i, pattern)] = -fit.objective + nll_z
    return out, failed


def _collect_log_q(cfg: ComplexityJobConfig, wanted: Mapping[int, Sequence[RowPattern]],
                   n_threads: int = 1) -> dict[tuple[int, RowPattern], np.ndarray]:
    """Common-random-number log Q arrays for every requested (i, pattern)."""
    n_fits_per_sample = sum(len(v) for v in wanted.values())
    if n_fits_per_sample == 0:
        return {}
    results = map_ordered(lambda k: _sample_log_q(cfg, k, wanted),
                          range(cfg.n_samples), n_threads)
    failed = sum(r[1] for r in results)
    total = cfg.n_samples * n_fits_per_sample
    if failed > MAX_FAILURE_FRACTION * total:
        raise ComplexityJobError(
            f"{failed} of {total} inner fits failed to converge "
            f"(limit {MAX_FAILURE_FRACTION:.0%}); refusing to emit estimates")
    if failed:
        log.warning("%d of %d inner fits failed to converge (within tolerance)", failed, total)
    out: dict[tuple[int, RowPattern], np.ndarray] = {}
    for i in sorted(wanted):
        for pattern in wanted[i]:
            out[(i, pattern)] = np.array([r[0][(i, pattern)] for r in results], dtype=np.float64)
    return out


def estimate_comp(pattern: RowPattern, i: int, cfg: ComplexityJobConfig,
                  keep_log_q: bool = False, n_threads: int = 1) -> ComplexityEstimate:
    """Monte-Carlo complexity of one row pattern for dimension i."""
    cfg.key(i, pattern)  # validates i and the pattern length
    pattern = tuple(int(b) for b in pattern)
    log_q = _collect_log_q(cfg, {i: [pattern]}, n_threads)[(i, pattern)]
    return _log_mean_exp_estimate(log_q, keep_log_q)


def precompute_cache(cfg: ComplexityJobConfig, spaces, cache: ComplexityCache | None = None,
                     path: str | None = None, n_threads: int = 1) -> ComplexityCache:
    """Estimate every missing (dimension, pattern) entry for the model spaces.

    spaces is one ModelSpace applied to every dimension or a sequence of p
    of them. Simulation and statistics are shared across all patterns of a
    sample, so the cost is n_samples simulations plus one fit per requested
    entry. Existing cache entries are skipped, which makes a partially
    written cache file resumable. New entries append to path in
    deterministic (dimension, space) order.
    """
    if cache is None:
        cache = ComplexityCache()
    space_list = _space_per_dim(spaces, cfg.dim)
    wanted: dict[int, list[RowPattern]] = {}
    for i in range(cfg.dim):
        missing = [pat for pat in space_list[i].patterns(cfg.dim, i)
                   if cfg.key(i, pat) not in cache]
        if missing:
            wanted[i] = missing
    if not wanted:
        return cache
    log_q = _collect_log_q(cfg, wanted, n_threads)
    new_entries = []
    for i in sorted(wanted):
        for pattern in wanted[i]:
            est = _log_mean_exp_estimate(log_q[(i, pattern)], keep_log_q=False)
            key = cfg.key(i, pattern)
            cache.put(key, est)
            new_entries.append((key, est))
    if path is not None:
        cache.append_to(path, new_entries)
    return cache


def _space_per_dim(spaces, p: int) -> list:
    if hasattr(spaces, "patterns"):
        return [spaces] * p
    space_list = list(spaces)
    if len(space_list) != p:
        raise ValidationError(f"expected one model space or {p} of them, got {len(space_list)}")
    return space_list
