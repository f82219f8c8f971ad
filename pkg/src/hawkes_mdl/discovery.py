"""Graph discovery by per-dimension MDL model selection.

Each dimension's parent pattern is chosen independently: the total score
of a candidate row is

    -log pi_i(pattern) + fitted (nll - log v) + complexity(pattern)

and the row with the smallest total wins. Because prior, luckiness and
complexity all factor over dimensions, stacking the per-row winners
minimizes the joint score over the product space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import likelihood
from .complexity import CacheKey, CacheMissError, ComplexityCache, ComplexityJobConfig, _space_per_dim
from .estimator import FitConfig, fit_view, log_luckiness
from .parallel import map_ordered
from .types import (Adjacency, ComplexityEstimate, EventData, LuckinessSpec, MdlScore,
                    ModelPrior, RowPattern, ValidationError)


@dataclass(frozen=True)
class ModelSpace:
    """Admissible row patterns for one dimension.

    kind "full" is every p-bit pattern. kind "sparse" bounds the number of
    cross parents by max_parents; the diagonal bit is pinned to 1 when
    force_self is set and to 0 otherwise, so the space size is
    sum over k <= max_parents of C(p - 1, k) either way. Enumeration order
    is lexicographic over the bit tuples and is part of the contract
    (deterministic scan order and tie handling depend on it).
    """

    kind: str = "full"
    max_parents: int | None = None
    force_self: bool = False

    def __post_init__(self) -> None:
        if self.kind not in ("full", "sparse"):
            raise ValidationError(f"unknown model space kind: {self.kind!r}")
        if self.kind == "sparse":
            if self.max_parents is None or int(self.max_parents) < 0:
                raise ValidationError("sparse spaces need max_parents >= 0")
            object.__setattr__(self, "max_parents", int(self.max_parents))
        elif self.max_parents is not None:
            raise ValidationError("full spaces take no max_parents bound")

    def size(self, p: int) -> int:
        if self.kind == "full":
            return 2 ** p
        m = min(self.max_parents, p - 1)
        return sum(math.comb(p - 1, k) for k in range(m + 1))

    def patterns(self, p: int, index: int) -> list[RowPattern]:
        """All admissible patterns for row `index`, lexicographic."""
        if not 0 <= index < p:
            raise ValidationError(f"row index {index} out of range for p={p}")
        if self.kind == "full":
            out = []
            for code in range(2 ** p):
                bits = tuple((code >> (p - 1 - b)) & 1 for b in range(p))
                out.append(bits)
            return out
        m = min(self.max_parents, p - 1)
        others = [j for j in range(p) if j != index]
        diag = 1 if self.force_self else 0
        out = []
        for k in range(m + 1):
            for chosen in combinations(others, k):
                row = [0] * p
                row[index] = diag
                for j in chosen:
                    row[j] = 1
                out.append(tuple(row))
        out.sort()
        return out

    def to_json_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "sparse":
            out["max_parents"] = self.max_parents
            out["force_self"] = self.force_self
        return out

    @classmethod
    def from_json_dict(cls, raw: dict) -> "ModelSpace":
        if not isinstance(raw, dict):
            raise ValidationError("model space record must be an object")
        allowed = {"kind", "max_parents", "force_self"}
        extra = set(raw) - allowed
        if extra:
            raise ValidationError(f"unknown keys in model space: {sorted(extra)}")
        return cls(kind=raw.get("kind", "full"), max_parents=raw.get("max_parents"),
                   force_self=bool(raw.get("force_self", False)))


def all_patterns_space(p: int) -> ModelSpace:
    return ModelSpace(kind="full")


def self_loop_space(p: int) -> ModelSpace:
    """Every pattern that keeps the diagonal bit set."""
    return ModelSpace(kind="sparse", max_parents=p - 1, force_self=True)


@dataclass(frozen=True)
class ScoredPattern:
    pattern: RowPattern
    score: MdlScore


def score_pattern(view: likelihood.DimensionView, space_size: int, prior: ModelPrior,
                  luck: LuckinessSpec, comp: ComplexityEstimate,
                  fit_cfg: FitConfig) -> MdlScore:
    fit = fit_view(view, luck, fit_cfg)
    neg_log_prior = prior.neg_log(view.pattern, space_size)
    if not fit.converged:
        return MdlScore(neg_log_prior=neg_log_prior, neg_log_lik=math.inf,
                        neg_log_luck=0.0, comp=comp.comp, converged=False)
    neg_log_lik = likelihood.nll_dim(fit.theta, view)
    neg_log_luck = 0.0 - log_luckiness(luck, fit.theta, view.pattern)
    return MdlScore(neg_log_prior=neg_log_prior, neg_log_lik=neg_log_lik,
                    neg_log_luck=neg_log_luck, comp=comp.comp, converged=True)


def mdl_objective_dim(data: EventData, i: int, pattern: RowPattern, space: ModelSpace,
                      prior: ModelPrior, luck: LuckinessSpec, comp: ComplexityEstimate,
                      beta: np.ndarray, fit_cfg: FitConfig = FitConfig()) -> MdlScore:
    """Full MDL score of one candidate row pattern."""
    view = likelihood.DimensionView.build(data, i, pattern, beta)
    return score_pattern(view, space.size(data.dim), prior, luck, comp, fit_cfg)


def _pick_best(scored: list[ScoredPattern]) -> ScoredPattern:
    # Exact ties break toward fewer edges, then lexicographically.
    return min(scored, key=lambda s: (s.score.total, sum(s.pattern), s.pattern))


def discover(data: EventData, spaces, cfg: ComplexityJobConfig, cache: ComplexityCache,
             n_threads: int = 1) -> tuple[Adjacency, list[list[ScoredPattern]]]:
    """Select the MDL-optimal parent pattern for every dimension.

    Requires a complexity estimate for every candidate; all missing cache
    keys are reported together before any fitting starts. Returns the
    stacked adjacency and the per-dimension score tables in enumeration
    order.
    """
    if data.dim != cfg.dim:
        raise ValidationError(f"data has {data.dim} dimensions but the job config says {cfg.dim}")
    if data.horizon != cfg.horizon:
        raise ValidationError(f"data horizon {data.horizon} does not match the job config horizon {cfg.horizon}")
    space_list = _space_per_dim(spaces, cfg.dim)
    per_dim: list[list[RowPattern]] = [space_list[i].patterns(cfg.dim, i) for i in range(cfg.dim)]
    missing: list[CacheKey] = []
    comps: dict[tuple[int, RowPattern], ComplexityEstimate] = {}
    for i in range(cfg.dim):
        for pattern in per_dim[i]:
            key = cfg.key(i, pattern)
            est = cache.get(key)
            if est is None:
                missing.append(key)
            else:
                comps[(i, pattern)] = est
    if missing:
        raise CacheMissError(missing)
    beta = cfg.beta_matrix()
    stats = [likelihood.DimensionStats.build(data, i, beta) for i in range(cfg.dim)]
    tasks = [(i, pattern) for i in range(cfg.dim) for pattern in per_dim[i]]

    def run(task):
        i, pattern = task
        view = likelihood.DimensionView(stats=stats[i], pattern=pattern)
        score = score_pattern(view, space_list[i].size(cfg.dim), cfg.model_prior,
                              cfg.luckiness, comps[(i, pattern)], cfg.fit)
        return ScoredPattern(pattern=pattern, score=score)

    flat = map_ordered(run, tasks, n_threads)
    tables: list[list[ScoredPattern]] = []
    rows: list[RowPattern] = []
    pos = 0
    for i in range(cfg.dim):
        table = flat[pos:pos + len(per_dim[i])]
        pos += len(per_dim[i])
        tables.append(table)
        rows.append(_pick_best(table).pattern)
    return Adjacency.from_rows(rows), tables
