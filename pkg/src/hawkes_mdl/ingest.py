"""Turn regularly sampled series into shock event data.

A sample is a shock when it exceeds the empirical upper quantile of its
trailing window. With window length W and tail fraction q, index t >= W
fires when values[t] is strictly greater than the k-th smallest of the W
samples ending at t (that window includes t itself), k = ceil((1 - q) W).
Event times are reported as t - W on a horizon of n - W, so the first W
samples serve as warm-up history and never emit events; an optional
time_scale stretches both times and horizon.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .types import EventData, ValidationError


@dataclass(frozen=True)
class SeriesData:
    """p aligned series of n samples plus the shock definition."""

    values: np.ndarray
    samples_per_window: int
    quantile: float = 0.20
    names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] < 1:
            raise ValidationError("values must be a (p, n) matrix")
        if not bool(np.all(np.isfinite(values))):
            raise ValidationError("series values must be finite")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        w = int(self.samples_per_window)
        if w < 1:
            raise ValidationError("samples_per_window must be >= 1")
        if w >= values.shape[1]:
            raise ValidationError("series must be longer than one window")
        object.__setattr__(self, "samples_per_window", w)
        q = float(self.quantile)
        if not 0.0 < q < 1.0:
            raise ValidationError("quantile must lie strictly between 0 and 1")
        object.__setattr__(self, "quantile", q)
        if self.names is not None:
            names = tuple(str(x) for x in self.names)
            if len(names) != values.shape[0]:
                raise ValidationError("one name per series required")
            object.__setattr__(self, "names", names)

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])

    @property
    def length(self) -> int:
        return int(self.values.shape[1])


def shocks_from_series(series: SeriesData, time_scale: float = 1.0) -> EventData:
    """Extract upper-tail shock events from every series.

    Deterministic: no randomness, no smoothing. Equal values never fire
    (the comparison is strict), so a constant series yields no events.
    """
    time_scale = float(time_scale)
    if not (math.isfinite(time_scale) and time_scale > 0.0):
        raise ValidationError("time_scale must be a positive finite number")
    w = series.samples_per_window
    n = series.length
    k = math.ceil((1.0 - series.quantile) * w)
    k = min(max(k, 1), w)
    events = []
    for i in range(series.dim):
        row = series.values[i]
        windows = np.lib.stride_tricks.sliding_window_view(row, w)[1:]
        thresh = np.partition(windows, k - 1, axis=1)[:, k - 1]
        latest = row[w:]
        idx = np.nonzero(latest > thresh)[0]
        events.append(idx.astype(np.float64) * time_scale)
    return EventData(horizon=(n - w) * time_scale, events=tuple(events))


def read_series_csv(path: str, samples_per_window: int, quantile: float = 0.20) -> SeriesData:
    """Load a CSV with one header row of names and one column per series."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError("series file is empty") from None
        names = tuple(h.strip() for h in header)
        if not names or any(not n for n in names):
            raise ValidationError("series file needs a header row of names")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(names):
                raise ValidationError(f"line {lineno}: expected {len(names)} values, got {len(row)}")
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise ValidationError(f"line {lineno}: {exc}") from None
    if not rows:
        raise ValidationError("series file has no data rows")
    values = np.asarray(rows, dtype=np.float64).T
    return SeriesData(values=values, samples_per_window=samples_per_window,
                      quantile=quantile, names=names)
