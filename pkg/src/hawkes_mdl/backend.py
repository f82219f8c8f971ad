"""Kernel backend selection.

The compiled extension is preferred when importable; otherwise the pure
Python mirror is used. HAWKES_MDL_BACKEND=compiled|pure|auto overrides the
choice at import time (compiled fails loudly if the extension is absent).
Numerical contracts across backends: decay statistics and simulation agree
bitwise, fitted optima agree to solver tolerance.
"""

from __future__ import annotations

import os

_ENV_VAR = "HAWKES_MDL_BACKEND"


def _load(which: str):
    if which == "pure":
        from . import _kernels_py
        return _kernels_py
    if which == "compiled":
        from . import _kernels  # type: ignore[attr-defined]
        return _kernels
    if which == "auto":
        try:
            from . import _kernels  # type: ignore[attr-defined]
            return _kernels
        except ImportError:
            from . import _kernels_py
            return _kernels_py
    raise ValueError(f"unrecognized backend {which!r}, expected auto, compiled or pure")


_impl = _load(os.environ.get(_ENV_VAR, "auto").strip().lower() or "auto")


def name() -> str:
    """Name of the active backend, compiled or pure."""
    return "compiled" if _impl.COMPILED else "pure"


def module():
    """The active backend module."""
    return _impl


def use(which: str) -> str:
    """Switch backends at runtime (testing and benchmarking hook)."""
    global _impl
    _impl = _load(which)
    return name()


def decay_history(target, source, decay):
    return _impl.decay_history(target, source, decay)


def interval_decay_sum(source, decay, horizon):
    return _impl.interval_decay_sum(source, decay, horizon)


def fit_nonneg(amat, lin, x0, tol, max_iter):
    return _impl.fit_nonneg(amat, lin, x0, tol, max_iter)


def simulate_thinning(mu, alpha, beta, horizon, gen, max_events):
    return _impl.simulate_thinning(mu, alpha, beta, horizon, gen, max_events)
