"""Pure-Python kernel backend.

Reference implementations of the numerical hot paths. The compiled module
_kernels mirrors these operation for operation; decay statistics and the
thinning simulator follow the exact same arithmetic order in both backends
so their outputs agree bitwise. The fit routine is vectorized with numpy
here and written as C loops there, so fitted optima agree only to solver
tolerance, not bit for bit.
"""

from __future__ import annotations

import math

import numpy as np

COMPILED = False

_ARMIJO_C = 1e-4
_STEP_MIN = 1e-12
_STEP_MAX = 1e12
_MAX_BACKTRACKS = 60
# Armijo acceptance slack: near the optimum the true per-step decrease falls
# below the float resolution of the objective, so descent can no longer be
# certified from values alone. Steps within this noise floor are accepted.
_F_NOISE = 1e-13


def decay_history(target: np.ndarray, source: np.ndarray, decay: float) -> np.ndarray:
    """Exponentially discounted counts of strictly earlier source events.

    out[l] = sum over source events s < target[l] of exp(-decay * (target[l] - s)),
    computed by the one-pass recursion
    out[l] = exp(-decay * dt) * out[l-1] + fresh terms with s in [target[l-1], target[l]).
    """
    n_t = len(target)
    n_s = len(source)
    out = np.empty(n_t, dtype=np.float64)
    tgt = [float(v) for v in target]
    src = [float(v) for v in source]
    acc = 0.0
    k = 0
    prev = 0.0
    for l in range(n_t):
        t = tgt[l]
        if l > 0:
            acc *= math.exp(-decay * (t - prev))
        while k < n_s and src[k] < t:
            acc += math.exp(-decay * (t - src[k]))
            k += 1
        out[l] = acc
        prev = t
    return out


def interval_decay_sum(source: np.ndarray, decay: float, horizon: float) -> float:
    """sum over source events s of (1 - exp(-decay * (horizon - s)))."""
    total = 0.0
    for s in source:
        total += 1.0 - math.exp(-decay * (horizon - float(s)))
    return total


def _value(amat: np.ndarray, lin: np.ndarray, x: np.ndarray):
    ax = amat @ x
    if ax.size and float(ax.min()) <= 0.0:
        return math.inf, None
    val = float(lin @ x)
    if ax.size:
        val -= float(np.sum(np.log(ax)))
    return val, ax


def _gradient(amat: np.ndarray, lin: np.ndarray, ax: np.ndarray) -> np.ndarray:
    if ax is None or ax.size == 0:
        return lin.copy()
    return lin - amat.T @ (1.0 / ax)


def _projected_grad_norm(x: np.ndarray, g: np.ndarray) -> float:
    pg = np.where(x > 0.0, g, np.minimum(g, 0.0))
    return float(np.abs(pg).max()) if pg.size else 0.0


def fit_nonneg(amat: np.ndarray, lin: np.ndarray, x0: np.ndarray,
               tol: float, max_iter: int) -> tuple[np.ndarray, int, bool]:
    """Minimize lin . x - sum(log(amat @ x)) over the nonnegative orthant.

    Projected gradient descent with a Barzilai-Borwein trial step and Armijo
    backtracking on the projection arc. The objective is convex on its
    domain; a step that lands outside (a nonpositive log argument) evaluates
    to +inf and is shrunk like any failed step.

    Returns (x, accepted_steps, converged) where converged means the
    projected gradient sup-norm reached tol.
    """
    amat = np.ascontiguousarray(amat, dtype=np.float64)
    lin = np.asarray(lin, dtype=np.float64)
    x = np.array(x0, dtype=np.float64)
    if x.size and float(x.min()) < 0.0:
        raise ValueError("start point must be nonnegative")
    f, ax = _value(amat, lin, x)
    if not math.isfinite(f):
        raise ValueError("start point is infeasible (nonpositive log argument)")
    g = _gradient(amat, lin, ax)
    step = 1.0 / max(1.0, float(np.abs(g).max()) if g.size else 1.0)
    ss = 0.0
    sy = 0.0
    iters = 0
    for _ in range(max_iter):
        if _projected_grad_norm(x, g) <= tol:
            return x, iters, True
        if sy > 0.0:
            step = min(max(ss / sy, _STEP_MIN), _STEP_MAX)
        accepted = False
        for _bt in range(_MAX_BACKTRACKS):
            xt = np.maximum(x - step * g, 0.0)
            d = xt - x
            gd = float(g @ d)
            if gd >= 0.0:
                step *= 0.5
                continue
            ft, axt = _value(amat, lin, xt)
            if ft <= f + _ARMIJO_C * gd + _F_NOISE * (1.0 + abs(f)):
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        gt = _gradient(amat, lin, axt)
        dg = gt - g
        ss = float(d @ d)
        sy = float(d @ dg)
        x, f, g = xt, ft, gt
        iters += 1
    return x, iters, _projected_grad_norm(x, g) <= tol


def simulate_thinning(mu: np.ndarray, alpha: np.ndarray, beta: np.ndarray,
                      horizon: float, gen: np.random.Generator,
                      max_events: int) -> tuple[list[float], list[int]]:
    """Ogata thinning for an exponential-kernel process on [0, horizon].

    The dominating rate is the total intensity at the last step, which is an
    upper bound until the next event because every kernel term only decays.
    Each candidate consumes exactly two uniforms: one for the waiting time,
    one shared by the accept test and the dimension choice. Returns parallel
    lists of accepted times and dimension indices.
    """
    p = len(mu)
    mu_l = [float(v) for v in mu]
    alpha_l = [[float(alpha[i][j]) for j in range(p)] for i in range(p)]
    beta_l = [[float(beta[i][j]) for j in range(p)] for i in range(p)]
    b0 = beta_l[0][0]
    const_beta = all(beta_l[i][j] == b0 for i in range(p) for j in range(p))
    excite = [[0.0] * p for _ in range(p)]
    lam = [0.0] * p
    times: list[float] = []
    ids: list[int] = []
    t = 0.0
    while True:
        bound = 0.0
        for i in range(p):
            s = mu_l[i]
            row = excite[i]
            for j in range(p):
                s += row[j]
            lam[i] = s
            bound += s
        if bound <= 0.0:
            break
        u1 = gen.random()
        if u1 <= 0.0:
            break
        wait = -math.log(u1) / bound
        t_new = t + wait
        if t_new > horizon:
            break
        if const_beta:
            fac = math.exp(-b0 * wait)
            for i in range(p):
                row = excite[i]
                for j in range(p):
                    row[j] *= fac
        else:
            for i in range(p):
                row = excite[i]
                for j in range(p):
                    row[j] *= math.exp(-beta_l[i][j] * wait)
        total = 0.0
        for i in range(p):
            s = mu_l[i]
            row = excite[i]
            for j in range(p):
                s += row[j]
            lam[i] = s
            total += s
        if total > bound * (1.0 + 1e-9):
            raise AssertionError("thinning bound fell below the intensity")
        u2 = gen.random()
        u = u2 * bound
        if u < total:
            d = p - 1
            acc = 0.0
            for i in range(p):
                acc += lam[i]
                if u < acc:
                    d = i
                    break
            times.append(t_new)
            ids.append(d)
            if len(times) > max_events:
                raise RuntimeError(f"simulation exceeded the event cap of {max_events} events")
            for i in range(p):
                excite[i][d] += alpha_l[i][d]
        t = t_new
    return times, ids
