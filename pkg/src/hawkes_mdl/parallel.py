"""Thread-pool helpers with deterministic result order."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")

ENV_THREADS = "HAWKES_MDL_THREADS"


def resolve_threads(explicit: int | None = None) -> int:
    """Worker count: explicit flag, else the environment, else the CPU count."""
    if explicit is not None:
        n = int(explicit)
    else:
        env = os.environ.get(ENV_THREADS, "").strip()
        n = int(env) if env else (os.cpu_count() or 1)
    if n < 1:
        raise ValueError("thread count must be >= 1")
    return n


def map_ordered(fn: Callable[..., T], args: Sequence, n_threads: int) -> list[T]:
    """Apply fn to each argument, returning results in input order.

    Results never depend on scheduling: submission order is the argument
    order and the gather is by index, so any reduction over the returned
    list is reproducible for every thread count.
    """
    if n_threads <= 1 or len(args) <= 1:
        return [fn(a) for a in args]
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        futures = [pool.submit(fn, a) for a in args]
        return [f.result() for f in futures]
