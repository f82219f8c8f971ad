"""Strict parsing of the JSON run configuration shared by the CLI commands.

Unknown keys anywhere in the document are rejected so a typo cannot
silently fall back to a default. The SHA-256 digest of the canonicalized
document identifies the configuration in result payloads.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .complexity import SCHEMA_VERSION, ComplexityJobConfig
from .discovery import ModelSpace, self_loop_space
from .estimator import FitConfig
from .evaluation import BenchmarkConfig
from .types import GenerativePrior, LuckinessSpec, ModelPrior, ValidationError

_TOP_KEYS = {"schema", "dim", "horizon", "generative_prior", "model_prior", "luckiness",
             "model_space", "n_samples", "n_trials", "master_seed", "fit"}
_REQUIRED = {"dim", "horizon", "generative_prior", "n_samples", "master_seed"}
_FIT_KEYS = {"tol", "max_iter"}


def config_digest(raw: dict) -> str:
    payload = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration plus the digest of its source document."""

    dim: int
    horizon: float
    gen_prior: GenerativePrior
    luckiness: LuckinessSpec
    model_prior: ModelPrior
    space: ModelSpace
    n_samples: int
    n_trials: int
    master_seed: int
    fit: FitConfig
    digest: str

    def job_config(self) -> ComplexityJobConfig:
        return ComplexityJobConfig(dim=self.dim, horizon=self.horizon, gen_prior=self.gen_prior,
                                   luckiness=self.luckiness, model_prior=self.model_prior,
                                   n_samples=self.n_samples, master_seed=self.master_seed,
                                   fit=self.fit)

    def benchmark_config(self) -> BenchmarkConfig:
        return BenchmarkConfig(dim=self.dim, horizon=self.horizon, gen_prior=self.gen_prior,
                               luckiness=self.luckiness, model_prior=self.model_prior,
                               space=self.space, n_samples=self.n_samples, n_trials=self.n_trials,
                               master_seed=self.master_seed, fit=self.fit)


def parse_run_config(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ValidationError("run config must be a JSON object")
    extra = set(raw) - _TOP_KEYS
    if extra:
        raise ValidationError(f"unknown keys in run config: {sorted(extra)}")
    missing = _REQUIRED - set(raw)
    if missing:
        raise ValidationError(f"missing keys in run config: {sorted(missing)}")
    if "schema" in raw and str(raw["schema"]) != SCHEMA_VERSION:
        raise ValidationError(f"unsupported schema {raw['schema']!r}, expected {SCHEMA_VERSION!r}")
    dim = raw["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ValidationError("dim must be a positive integer")
    n_samples = raw["n_samples"]
    if not isinstance(n_samples, int) or isinstance(n_samples, bool) or n_samples < 1:
        raise ValidationError("n_samples must be a positive integer")
    master_seed = raw["master_seed"]
    if not isinstance(master_seed, int) or isinstance(master_seed, bool) or master_seed < 0:
        raise ValidationError("master_seed must be a nonnegative integer")
    n_trials = raw.get("n_trials", 20)
    if not isinstance(n_trials, int) or isinstance(n_trials, bool) or n_trials < 1:
        raise ValidationError("n_trials must be a positive integer")
    gen_prior = GenerativePrior.from_json_dict(raw["generative_prior"])
    luckiness = LuckinessSpec.from_json_dict(raw.get("luckiness", "uniform"))
    model_prior = ModelPrior.from_json_dict(raw.get("model_prior", "uniform"))
    if "model_space" in raw:
        space = ModelSpace.from_json_dict(raw["model_space"])
    else:
        space = self_loop_space(dim)
    fit_raw = raw.get("fit", {})
    if not isinstance(fit_raw, dict):
        raise ValidationError("fit must be an object")
    fit_extra = set(fit_raw) - _FIT_KEYS
    if fit_extra:
        raise ValidationError(f"unknown keys in fit config: {sorted(fit_extra)}")
    fit = FitConfig(tol=fit_raw.get("tol", 1e-8), max_iter=fit_raw.get("max_iter", 2000))
    return RunConfig(dim=dim, horizon=float(raw["horizon"]), gen_prior=gen_prior,
                     luckiness=luckiness, model_prior=model_prior, space=space,
                     n_samples=n_samples, n_trials=n_trials, master_seed=master_seed,
                     fit=fit, digest=config_digest(raw))


def load_run_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path} is not valid JSON: {exc}") from None
    return parse_run_config(raw)


def paper_scale(cfg: RunConfig) -> RunConfig:
    """Rescale a run config to the full experimental protocol.

    Seven dimensions, dense-scenario prior, 1000 Monte-Carlo samples and
    100 trials; the horizon and seeds come from the base config. Hour-scale
    precompute; not exercised by the test suite.
    """
    gen = GenerativePrior(scenario="default", edge_prob=0.3, alpha_range=(0.1, 0.2),
                          mu_range=(0.5, 1.0), beta=1.0, self_excite=True)
    return RunConfig(dim=7, horizon=cfg.horizon, gen_prior=gen, luckiness=cfg.luckiness,
                     model_prior=cfg.model_prior, space=self_loop_space(7), n_samples=1000,
                     n_trials=100, master_seed=cfg.master_seed, fit=cfg.fit,
                     digest=cfg.digest)
