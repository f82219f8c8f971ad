"""Timing comparison of the compiled and pure kernel backends.

Runs the three hot kernels on realistic workloads and reports per-call
times plus the speedup. Also cross-checks agreement while it is at it:
decay statistics and simulation must match bitwise, fits to tolerance.

Usage: python benchmarks/bench_backends.py [--repeat N]
"""

import argparse
import time

import numpy as np

from hawkes_mdl import GenerativePrior, SeedSpec, draw_graph, draw_params, simulation
from hawkes_mdl.estimator import default_start
from hawkes_mdl.likelihood import DimensionView, DimensionStats, design_matrices

try:
    from hawkes_mdl import _kernels
except ImportError:
    _kernels = None
from hawkes_mdl import _kernels_py


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5, help="timing repetitions (best taken)")
    args = ap.parse_args()

    if _kernels is None:
        raise SystemExit("compiled backend is not built; install the package first")

    prior = GenerativePrior(scenario="default", edge_prob=0.3)
    seed = SeedSpec(123)
    graph = draw_graph(prior, 4, seed.child(0))
    params = draw_params(prior, graph, seed.child(1))
    data = simulation.simulate(params, 400.0, seed.child(2))
    target = data.events[0]
    source = data.events[1]
    beta = params.beta

    print(f"workload: p=4, horizon=400, counts={data.counts()}")
    print(f"{'kernel':<22}{'compiled':>12}{'pure':>12}{'speedup':>9}")

    rows = []
    c_t, c_out = _time(lambda: _kernels.decay_history(target, source, 1.0), args.repeat)
    p_t, p_out = _time(lambda: _kernels_py.decay_history(target, source, 1.0), args.repeat)
    assert np.array_equal(c_out, p_out), "decay_history backends disagree"
    rows.append(("decay_history", c_t, p_t))

    stats = DimensionStats.build(data, 0, beta)
    view = DimensionView(stats=stats, pattern=(1, 1, 1, 1))
    amat, lin = design_matrices(view)
    x0 = default_start(view)
    c_t, c_out = _time(lambda: _kernels.fit_nonneg(amat, lin, x0, 1e-8, 2000), args.repeat)
    p_t, p_out = _time(lambda: _kernels_py.fit_nonneg(amat, lin, x0, 1e-8, 2000), args.repeat)
    assert c_out[2] and p_out[2], "fit did not converge"
    assert np.max(np.abs(c_out[0] - p_out[0])) < 1e-6, "fit backends disagree beyond tolerance"
    rows.append(("fit_nonneg", c_t, p_t))

    def sim(mod):
        return mod.simulate_thinning(params.mu, params.alpha, params.beta,
                                     400.0, seed.child(3).generator(), 10**7)

    c_t, c_out = _time(lambda: sim(_kernels), args.repeat)
    p_t, p_out = _time(lambda: sim(_kernels_py), args.repeat)
    assert c_out == p_out, "simulation backends disagree"
    rows.append(("simulate_thinning", c_t, p_t))

    for name, c_t, p_t in rows:
        print(f"{name:<22}{c_t * 1e3:>10.3f}ms{p_t * 1e3:>10.3f}ms{p_t / c_t:>8.1f}x")


if __name__ == "__main__":
    main()
