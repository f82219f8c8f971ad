# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernel backend.

Mirrors _kernels_py operation for operation. Decay statistics and the
thinning simulator perform the same floating-point operations in the same
order as the pure backend, so those outputs agree bitwise; the fit routine
uses plain C loops instead of numpy reductions and agrees to solver
tolerance only.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, exp, fabs, log

cnp.import_array()

COMPILED = True

cdef double _ARMIJO_C = 1e-4
cdef double _STEP_MIN = 1e-12
cdef double _STEP_MAX = 1e12
cdef int _MAX_BACKTRACKS = 60
# Armijo acceptance slack: near the optimum the true per-step decrease falls
# below the float resolution of the objective, so descent can no longer be
# certified from values alone. Steps within this noise floor are accepted.
cdef double _F_NOISE = 1e-13


def decay_history(target, source, double decay):
    """Exponentially discounted counts of strictly earlier source events."""
    t_arr = np.ascontiguousarray(target, dtype=np.float64)
    s_arr = np.ascontiguousarray(source, dtype=np.float64)
    out_arr = np.empty(t_arr.shape[0], dtype=np.float64)
    cdef const double[::1] tgt = t_arr
    cdef const double[::1] src = s_arr
    cdef double[::1] out = out_arr
    cdef Py_ssize_t n_t = tgt.shape[0]
    cdef Py_ssize_t n_s = src.shape[0]
    cdef Py_ssize_t l, k = 0
    cdef double acc = 0.0
    cdef double prev = 0.0
    cdef double t
    with nogil:
        for l in range(n_t):
            t = tgt[l]
            if l > 0:
                acc *= exp(-decay * (t - prev))
            while k < n_s and src[k] < t:
                acc += exp(-decay * (t - src[k]))
                k += 1
            out[l] = acc
            prev = t
    return out_arr


def interval_decay_sum(source, double decay, double horizon):
    """sum over source events s of (1 - exp(-decay * (horizon - s)))."""
    s_arr = np.ascontiguousarray(source, dtype=np.float64)
    cdef const double[::1] src = s_arr
    cdef Py_ssize_t n = src.shape[0]
    cdef Py_ssize_t k
    cdef double total = 0.0
    with nogil:
        for k in range(n):
            total += 1.0 - exp(-decay * (horizon - src[k]))
    return total


cdef double _eval_f(const double[:, ::1] A, const double[::1] c, const double[::1] x, double[::1] ax) noexcept nogil:
    cdef Py_ssize_t n = A.shape[0]
    cdef Py_ssize_t d = A.shape[1]
    cdef Py_ssize_t l, k
    cdef double f = 0.0
    cdef double s
    for k in range(d):
        f += c[k] * x[k]
    for l in range(n):
        s = 0.0
        for k in range(d):
            s += A[l, k] * x[k]
        if s <= 0.0:
            return INFINITY
        ax[l] = s
    for l in range(n):
        f -= log(ax[l])
    return f


cdef void _eval_grad(const double[:, ::1] A, const double[::1] c, const double[::1] ax, double[::1] g) noexcept nogil:
    cdef Py_ssize_t n = A.shape[0]
    cdef Py_ssize_t d = A.shape[1]
    cdef Py_ssize_t l, k
    cdef double w
    for k in range(d):
        g[k] = c[k]
    for l in range(n):
        w = 1.0 / ax[l]
        for k in range(d):
            g[k] -= A[l, k] * w


cdef double _pg_norm(const double[::1] x, const double[::1] g) noexcept nogil:
    cdef Py_ssize_t d = x.shape[0]
    cdef Py_ssize_t k
    cdef double m = 0.0
    cdef double pg
    for k in range(d):
        pg = g[k]
        if x[k] <= 0.0 and pg > 0.0:
            pg = 0.0
        if fabs(pg) > m:
            m = fabs(pg)
    return m


def fit_nonneg(amat, lin, x0, double tol, int max_iter):
    """Minimize lin . x - sum(log(amat @ x)) over the nonnegative orthant.

    Same algorithm as the pure backend: projected gradient descent with a
    Barzilai-Borwein trial step and Armijo backtracking on the projection
    arc. Returns (x, accepted_steps, converged).
    """
    a_arr = np.ascontiguousarray(amat, dtype=np.float64)
    c_arr = np.ascontiguousarray(lin, dtype=np.float64)
    x_arr = np.array(x0, dtype=np.float64)
    if a_arr.ndim != 2 or c_arr.ndim != 1 or x_arr.ndim != 1:
        raise ValueError("fit_nonneg expects a 2-d design and 1-d vectors")
    if a_arr.shape[1] != x_arr.shape[0] or c_arr.shape[0] != x_arr.shape[0]:
        raise ValueError("design, linear term and start point disagree on size")
    cdef const double[:, ::1] A = a_arr
    cdef const double[::1] c = c_arr
    cdef double[::1] x = x_arr
    cdef Py_ssize_t n = A.shape[0]
    cdef Py_ssize_t d = A.shape[1]
    ax_arr = np.empty(n, dtype=np.float64)
    axt_arr = np.empty(n, dtype=np.float64)
    g_arr = np.empty(d, dtype=np.float64)
    gt_arr = np.empty(d, dtype=np.float64)
    xt_arr = np.empty(d, dtype=np.float64)
    cdef double[::1] ax = ax_arr
    cdef double[::1] axt = axt_arr
    cdef double[::1] g = g_arr
    cdef double[::1] gt = gt_arr
    cdef double[::1] xt = xt_arr
    cdef Py_ssize_t k, l
    cdef double f, ft, step, gd, v, dx, gmax
    cdef double ss = 0.0
    cdef double sy = 0.0
    cdef int iters = 0
    cdef int it, bt
    cdef bint accepted, converged = False
    for k in range(d):
        if x[k] < 0.0:
            raise ValueError("start point must be nonnegative")
    f = _eval_f(A, c, x, ax)
    if f == INFINITY:
        raise ValueError("start point is infeasible (nonpositive log argument)")
    _eval_grad(A, c, ax, g)
    gmax = 0.0
    for k in range(d):
        if fabs(g[k]) > gmax:
            gmax = fabs(g[k])
    step = 1.0 / (gmax if gmax > 1.0 else 1.0)
    with nogil:
        for it in range(max_iter):
            if _pg_norm(x, g) <= tol:
                converged = True
                break
            if sy > 0.0:
                step = ss / sy
                if step < _STEP_MIN:
                    step = _STEP_MIN
                if step > _STEP_MAX:
                    step = _STEP_MAX
            accepted = False
            for bt in range(_MAX_BACKTRACKS):
                gd = 0.0
                for k in range(d):
                    v = x[k] - step * g[k]
                    if v < 0.0:
                        v = 0.0
                    xt[k] = v
                    gd += g[k] * (v - x[k])
                if gd >= 0.0:
                    step *= 0.5
                    continue
                ft = _eval_f(A, c, xt, axt)
                if ft <= f + _ARMIJO_C * gd + _F_NOISE * (1.0 + fabs(f)):
                    accepted = True
                    break
                step *= 0.5
            if not accepted:
                break
            _eval_grad(A, c, axt, gt)
            ss = 0.0
            sy = 0.0
            for k in range(d):
                dx = xt[k] - x[k]
                ss += dx * dx
                sy += dx * (gt[k] - g[k])
                x[k] = xt[k]
                g[k] = gt[k]
            f = ft
            iters += 1
    if not converged:
        converged = _pg_norm(x, g) <= tol
    return x_arr, iters, bool(converged)


def simulate_thinning(mu, alpha, beta, double horizon, gen, long max_events):
    """Ogata thinning for an exponential-kernel process on [0, horizon].

    The uniform draws come from gen.random() exactly as in the pure backend,
    so for a given generator state both backends accept the same events.
    """
    mu_arr = np.ascontiguousarray(mu, dtype=np.float64)
    alpha_arr = np.ascontiguousarray(alpha, dtype=np.float64)
    beta_arr = np.ascontiguousarray(beta, dtype=np.float64)
    cdef const double[::1] m = mu_arr
    cdef const double[:, ::1] a = alpha_arr
    cdef const double[:, ::1] b = beta_arr
    cdef Py_ssize_t p = m.shape[0]
    excite_arr = np.zeros((p, p), dtype=np.float64)
    lam_arr = np.empty(p, dtype=np.float64)
    cdef double[:, ::1] excite = excite_arr
    cdef double[::1] lam = lam_arr
    cdef double b0 = b[0, 0]
    cdef bint const_beta = True
    cdef Py_ssize_t i, j, dsel
    for i in range(p):
        for j in range(p):
            if b[i, j] != b0:
                const_beta = False
    times = []
    ids = []
    cdef double t = 0.0
    cdef double bound, u1, u2, wait, t_new, fac, total, u, acc, s
    cdef long count = 0
    while True:
        bound = 0.0
        for i in range(p):
            s = m[i]
            for j in range(p):
                s += excite[i, j]
            lam[i] = s
            bound += s
        if bound <= 0.0:
            break
        u1 = gen.random()
        if u1 <= 0.0:
            break
        wait = -log(u1) / bound
        t_new = t + wait
        if t_new > horizon:
            break
        if const_beta:
            fac = exp(-b0 * wait)
            for i in range(p):
                for j in range(p):
                    excite[i, j] *= fac
        else:
            for i in range(p):
                for j in range(p):
                    excite[i, j] *= exp(-b[i, j] * wait)
        total = 0.0
        for i in range(p):
            s = m[i]
            for j in range(p):
                s += excite[i, j]
            lam[i] = s
            total += s
        if total > bound * (1.0 + 1e-9):
            raise AssertionError("thinning bound fell below the intensity")
        u2 = gen.random()
        u = u2 * bound
        if u < total:
            dsel = p - 1
            acc = 0.0
            for i in range(p):
                acc += lam[i]
                if u < acc:
                    dsel = i
                    break
            times.append(t_new)
            ids.append(dsel)
            count += 1
            if count > max_events:
                raise RuntimeError(f"simulation exceeded the event cap of {max_events} events")
            for i in range(p):
                excite[i, dsel] += a[i, dsel]
        t = t_new
    return times, ids
