"""End-to-end recovery benchmark: simulate, discover, score against truth.

F1 compares binary matrices entrywise over all p * p positions, diagonal
included, with 1 as the positive class. The random baseline places the
same number of ones uniformly at random, so its expected F1 equals the
truth's edge density (matching ones over a uniform placement make
TP / K with expectation K / p^2).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .complexity import ComplexityCache, ComplexityJobConfig
from .discovery import ModelSpace, discover, self_loop_space
from .estimator import FitConfig
from .parallel import map_ordered
from .seeding import SeedSpec
from .simulation import draw_graph, draw_params, simulate
from .types import Adjacency, GenerativePrior, LuckinessSpec, ModelPrior, ValidationError

# Path namespace for benchmark trials (see seeding module conventions).
_TRIAL_NS = 1
_ROLE_GRAPH = 0
_ROLE_PARAMS = 1
_ROLE_EVENTS = 2
_ROLE_BASELINE = 3

TRIAL_CSV_COLUMNS = ("trial", "seed", "f1", "random_f1", "discovery_seconds")


def f1(pred: Adjacency, truth: Adjacency) -> float:
    """Entrywise F1 of a predicted edge matrix against the truth.

    Counts run over every position including the diagonal. When both
    matrices are all zero there is nothing to miss, which scores 1.0.
    """
    if pred.dim != truth.dim:
        raise ValidationError("adjacency sizes differ")
    a = pred.entries
    b = truth.entries
    tp = int(np.sum((a == 1) & (b == 1)))
    fp = int(np.sum((a == 1) & (b == 0)))
    fn = int(np.sum((a == 0) & (b == 1)))
    if tp + fp + fn == 0:
        return 1.0
    return 2.0 * tp / (2.0 * tp + fp + fn)


def random_baseline_f1(truth: Adjacency, seed: SeedSpec) -> float:
    """F1 of a uniformly random matrix with the truth's edge count."""
    p = truth.dim
    count = truth.edge_count()
    gen = seed.generator()
    cells = gen.choice(p * p, size=count, replace=False)
    entries = np.zeros(p * p, dtype=np.int8)
    entries[cells] = 1
    return f1(Adjacency(entries=entries.reshape(p, p)), truth)


@dataclass(frozen=True)
class BenchmarkConfig:
    """One benchmark setting: a generative scenario plus discovery settings."""

    dim: int = 4
    horizon: float = 400.0
    gen_prior: GenerativePrior = field(default_factory=GenerativePrior)
    luckiness: LuckinessSpec = LuckinessSpec("uniform")
    model_prior: ModelPrior = ModelPrior("uniform")
    space: ModelSpace | None = None
    n_samples: int = 200
    n_trials: int = 20
    master_seed: int = 0
    fit: FitConfig = field(default_factory=FitConfig)

    def __post_init__(self) -> None:
        if int(self.n_trials) < 1:
            raise ValidationError("n_trials must be >= 1")
        object.__setattr__(self, "n_trials", int(self.n_trials))
        if self.space is None:
            object.__setattr__(self, "space", self_loop_space(int(self.dim)))

    def job_config(self) -> ComplexityJobConfig:
        return ComplexityJobConfig(dim=self.dim, horizon=self.horizon, gen_prior=self.gen_prior,
                                   luckiness=self.luckiness, model_prior=self.model_prior,
                                   n_samples=self.n_samples, master_seed=self.master_seed,
                                   fit=self.fit)


@dataclass(frozen=True)
class TrialResult:
    trial: int
    stream_id: int
    f1: float | None
    random_f1: float | None
    seconds: float
    error: str | None = None


@dataclass(frozen=True)
class BenchmarkResult:
    trials: tuple[TrialResult, ...]
    summary: dict


def _mean_stderr(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var / n)


def run_trial(cfg: BenchmarkConfig, cache: ComplexityCache, t: int) -> TrialResult:
    root = SeedSpec(cfg.master_seed)
    trial_seed = root.child(_TRIAL_NS, t)
    try:
        truth = draw_graph(cfg.gen_prior, cfg.dim, trial_seed.child(_ROLE_GRAPH))
        params = draw_params(cfg.gen_prior, truth, trial_seed.child(_ROLE_PARAMS))
        data = simulate(params, cfg.horizon, trial_seed.child(_ROLE_EVENTS))
        t0 = time.perf_counter()
        pred, _tables = discover(data, cfg.space, cfg.job_config(), cache)
        seconds = time.perf_counter() - t0
        return TrialResult(trial=t, stream_id=trial_seed.stream_id(),
                           f1=f1(pred, truth),
                           random_f1=random_baseline_f1(truth, trial_seed.child(_ROLE_BASELINE)),
                           seconds=seconds)
    except Exception as exc:  # noqa: BLE001 - per-trial isolation is the contract
        return TrialResult(trial=t, stream_id=trial_seed.stream_id(),
                           f1=None, random_f1=None, seconds=0.0, error=str(exc))


def run_benchmark(cfg: BenchmarkConfig, cache: ComplexityCache,
                  n_threads: int = 1) -> BenchmarkResult:
    """Run every trial, tolerating per-trial failures.

    A failed trial keeps its row (with empty scores) and is counted in the
    summary; remaining trials still run. The summary averages successful
    trials only.
    """
    trials = map_ordered(lambda t: run_trial(cfg, cache, t), range(cfg.n_trials), n_threads)
    ok = [tr for tr in trials if tr.error is None]
    summary: dict = {
        "dim": cfg.dim,
        "horizon": cfg.horizon,
        "n_samples": cfg.n_samples,
        "n_trials": cfg.n_trials,
        "n_failed": len(trials) - len(ok),
    }
    if ok:
        mean, stderr = _mean_stderr([tr.f1 for tr in ok])
        rmean, rstderr = _mean_stderr([tr.random_f1 for tr in ok])
        summary.update(mean_f1=mean, stderr_f1=stderr,
                       mean_random_f1=rmean, stderr_random_f1=rstderr)
    return BenchmarkResult(trials=tuple(trials), summary=summary)


def trial_rows(result: BenchmarkResult) -> list[list[str]]:
    """CSV rows for the trial table; failures leave their scores blank."""
    rows = [list(TRIAL_CSV_COLUMNS)]
    for tr in result.trials:
        if tr.error is None:
            rows.append([str(tr.trial), str(tr.stream_id), repr(tr.f1),
                         repr(tr.random_f1), repr(tr.seconds)])
        else:
            rows.append([str(tr.trial), str(tr.stream_id), "", "", ""])
    return rows
