"""Command-line interface.

Subcommands: simulate, nll, precompute, discover, benchmark, ingest.
Results go to files, diagnostics to stderr. Exit codes: 0 success,
1 invalid input (flags, schemas, missing files or cache entries),
2 runtime failure (non-stationary simulation, failed complexity job).
Reruns with identical inputs write byte-identical payloads; the only
nondeterministic output column is the wall-clock discovery_seconds in the
benchmark trial table.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

from . import __version__, backend
from .complexity import (SCHEMA_VERSION, CacheMissError, ComplexityCache,
                         ComplexityJobError, precompute_cache)
from .discovery import discover
from .evaluation import run_benchmark, trial_rows
from .ingest import read_series_csv, shocks_from_series
from .likelihood import full_view, nll_dim
from .parallel import resolve_threads
from .runconfig import RunConfig, load_run_config, paper_scale
from .seeding import SeedSpec
from .simulation import SimulationError, draw_graph, draw_params, simulate
from .types import EventData, ExpMhpParams, ValidationError, validate_event_data

log = logging.getLogger(__name__)

# Path namespace for CLI simulate draws (see seeding module conventions).
_AUX_NS = 2

SCORE_CSV_COLUMNS = ("dimension", "pattern", "negLogPrior", "negLogLik",
                     "negLogLuck", "comp", "total")


class _Parser(argparse.ArgumentParser):
    """argparse with validation-style exit codes (1, not 2)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def _write_json(path: str, payload: dict) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _write_csv(path: str, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerows(rows)


def _load_events(path: str) -> EventData:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path} is not valid JSON: {exc}") from None
    return validate_event_data(raw)


def _load_params(path: str) -> ExpMhpParams:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path} is not valid JSON: {exc}") from None
    return ExpMhpParams.from_json_dict(raw)


def _maybe_paper_scale(cfg: RunConfig, args) -> RunConfig:
    if getattr(args, "paper_scale", False):
        log.warning("paper-scale protocol selected; expect an hour-scale precompute")
        return paper_scale(cfg)
    return cfg


def _cmd_simulate(args) -> int:
    cfg = load_run_config(args.config)
    dim = args.dim if args.dim is not None else cfg.dim
    horizon = args.horizon if args.horizon is not None else cfg.horizon
    master = args.seed if args.seed is not None else cfg.master_seed
    root = SeedSpec(master)
    graph = draw_graph(cfg.gen_prior, dim, root.child(_AUX_NS, 0))
    params = draw_params(cfg.gen_prior, graph, root.child(_AUX_NS, 1))
    data = simulate(params, horizon, root.child(_AUX_NS, 2))
    _write_json(args.out, data.to_json_dict())
    if args.truth_out:
        _write_json(args.truth_out, graph.to_json_dict())
    log.info("wrote %d events across %d dimensions to %s",
             sum(data.counts()), data.dim, args.out)
    return 0


def _cmd_nll(args) -> int:
    data = _load_events(args.events)
    params = _load_params(args.params)
    per_dim = [nll_dim(params.theta_row(i), full_view(data, i, params.beta))
               for i in range(data.dim)]
    payload = {
        "schema": SCHEMA_VERSION,
        "per_dimension": per_dim,
        "total": sum(per_dim),
    }
    if args.out:
        _write_json(args.out, payload)
    else:
        json.dump(payload, sys.stdout, sort_keys=True, indent=2)
        sys.stdout.write("\n")
    return 0


def _cmd_precompute(args) -> int:
    cfg = _maybe_paper_scale(load_run_config(args.config), args)
    if os.path.exists(args.out) and not args.resume:
        raise ValidationError(f"{args.out} exists; pass --resume to extend it")
    cache = ComplexityCache.load(args.out) if (args.resume and os.path.exists(args.out)) else ComplexityCache()
    before = len(cache)
    cache = precompute_cache(cfg.job_config(), cfg.space, cache=cache, path=args.out,
                             n_threads=resolve_threads(args.threads))
    log.info("cache %s: %d entries (%d new)", args.out, len(cache), len(cache) - before)
    return 0


def _cmd_discover(args) -> int:
    cfg = _maybe_paper_scale(load_run_config(args.config), args)
    data = _load_events(args.events)
    cache = ComplexityCache.load(args.cache)
    adjacency, tables = discover(data, cfg.space, cfg.job_config(), cache,
                                 n_threads=resolve_threads(args.threads))
    _write_json(args.out, adjacency.to_json_dict())
    if args.scores:
        rows = [list(SCORE_CSV_COLUMNS)]
        for i, table in enumerate(tables):
            for entry in table:
                s = entry.score
                rows.append([str(i), "".join(str(b) for b in entry.pattern),
                             repr(s.neg_log_prior), repr(s.neg_log_lik),
                             repr(s.neg_log_luck), repr(s.comp), repr(s.total)])
        _write_csv(args.scores, rows)
    log.info("selected %d edges; wrote %s", adjacency.edge_count(), args.out)
    return 0


def _cmd_benchmark(args) -> int:
    cfg = _maybe_paper_scale(load_run_config(args.config), args)
    cache = ComplexityCache.load(args.cache)
    result = run_benchmark(cfg.benchmark_config(), cache,
                           n_threads=resolve_threads(args.threads))
    _write_csv(args.out_csv, trial_rows(result))
    summary = dict(result.summary)
    summary.update(schema=SCHEMA_VERSION, config_digest=cfg.digest,
                   master_seed=cfg.master_seed, backend=backend.name())
    _write_json(args.out_json, summary)
    if result.summary.get("n_failed"):
        log.warning("%d of %d trials failed", result.summary["n_failed"], cfg.n_trials)
    log.info("mean F1 %.4f over %d trials (random %.4f)",
             summary.get("mean_f1", float("nan")), cfg.n_trials,
             summary.get("mean_random_f1", float("nan")))
    return 0


def _cmd_ingest(args) -> int:
    series = read_series_csv(args.csv, samples_per_window=args.window, quantile=args.quantile)
    data = shocks_from_series(series, time_scale=args.time_scale)
    _write_json(args.out, data.to_json_dict())
    log.info("extracted %s shock events on horizon %g", data.counts(), data.horizon)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hawkes-mdl",
                     description="Granger-causal discovery for exponential Hawkes processes by MDL")
    parser.add_argument("--version", action="version",
                        version=f"hawkes-mdl {__version__} (schema {SCHEMA_VERSION})")
    parser.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_sim = sub.add_parser("simulate", help="draw a model from the prior and simulate events")
    p_sim.add_argument("--config", required=True, help="run config JSON")
    p_sim.add_argument("--dim", type=int, help="override the config dimension count")
    p_sim.add_argument("--horizon", type=float, help="override the config horizon")
    p_sim.add_argument("--seed", type=int, help="override the config master seed")
    p_sim.add_argument("--out", required=True, help="events JSON output")
    p_sim.add_argument("--truth-out", help="also write the drawn adjacency JSON")
    p_sim.set_defaults(func=_cmd_simulate)

    p_nll = sub.add_parser("nll", help="evaluate the negative log-likelihood of events")
    p_nll.add_argument("--events", required=True, help="events JSON")
    p_nll.add_argument("--params", required=True, help="parameter JSON (mu, alpha, beta)")
    p_nll.add_argument("--out", help="JSON output (default: stdout)")
    p_nll.set_defaults(func=_cmd_nll)

    p_pre = sub.add_parser("precompute", help="estimate complexity terms into a cache file")
    p_pre.add_argument("--config", required=True, help="run config JSON")
    p_pre.add_argument("--out", required=True, help="JSON-lines cache file")
    p_pre.add_argument("--resume", action="store_true", help="extend an existing cache file")
    p_pre.add_argument("--threads", type=int, help="worker threads (default: env or CPU count)")
    p_pre.add_argument("--paper-scale", action="store_true", help="full experimental protocol")
    p_pre.set_defaults(func=_cmd_precompute)

    p_dis = sub.add_parser("discover", help="select the MDL-optimal graph for observed events")
    p_dis.add_argument("--events", required=True, help="events JSON")
    p_dis.add_argument("--cache", required=True, help="complexity cache file")
    p_dis.add_argument("--config", required=True, help="run config JSON")
    p_dis.add_argument("--out", required=True, help="adjacency JSON output")
    p_dis.add_argument("--scores", help="optional per-pattern score table CSV")
    p_dis.add_argument("--threads", type=int, help="worker threads (default: env or CPU count)")
    p_dis.add_argument("--paper-scale", action="store_true", help="full experimental protocol")
    p_dis.set_defaults(func=_cmd_discover)

    p_ben = sub.add_parser("benchmark", help="simulate, discover and score many trials")
    p_ben.add_argument("--config", required=True, help="run config JSON")
    p_ben.add_argument("--cache", required=True, help="complexity cache file")
    p_ben.add_argument("--out-csv", required=True, help="per-trial results CSV")
    p_ben.add_argument("--out-json", required=True, help="summary JSON")
    p_ben.add_argument("--threads", type=int, help="worker threads (default: env or CPU count)")
    p_ben.add_argument("--paper-scale", action="store_true", help="full experimental protocol")
    p_ben.set_defaults(func=_cmd_benchmark)

    p_ing = sub.add_parser("ingest", help="turn sampled series into shock events")
    p_ing.add_argument("--csv", required=True, help="series CSV, one named column per series")
    p_ing.add_argument("--window", type=int, required=True, help="trailing window length")
    p_ing.add_argument("--quantile", type=float, default=0.20, help="upper tail fraction (default 0.20)")
    p_ing.add_argument("--time-scale", type=float, default=1.0, help="stretch factor for event times")
    p_ing.add_argument("--out", required=True, help="events JSON output")
    p_ing.set_defaults(func=_cmd_ingest)
    return parser


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(stream=sys.stderr,
                        level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValidationError, CacheMissError, FileNotFoundError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except (SimulationError, ComplexityJobError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary maps everything to exit 2
        sys.stderr.write(f"unexpected error: {type(exc).__name__}: {exc}\n")
        return 2


def main() -> None:
    sys.exit(dispatch())
