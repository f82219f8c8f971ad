"""Deterministic, hierarchical random-stream derivation.

Every stochastic routine takes a SeedSpec, a master integer plus a path of
small integers naming the consumer (sample index, trial index, role). The
stream is derived by hashing the pair, so results do not depend on thread
scheduling or on how many other streams exist, and distinct paths give
independent streams.

Path conventions used across the package (first path element):
0 Monte-Carlo complexity samples, 1 benchmark trials, 2 auxiliary draws.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

_DOMAIN = b"hawkes-mdl/1"


@dataclass(frozen=True)
class SeedSpec:
    """A named random stream: master seed plus derivation path."""

    master: int
    path: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        master = int(self.master)
        if not 0 <= master < 2**64:
            raise ValueError("master seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "master", master)
        path = tuple(int(x) for x in self.path)
        if any(x < 0 or x >= 2**64 for x in path):
            raise ValueError("path elements must fit in unsigned 64-bit integers")
        object.__setattr__(self, "path", path)

    def child(self, *path: int) -> "SeedSpec":
        """Extend the derivation path; children of distinct paths never collide."""
        return SeedSpec(master=self.master, path=self.path + tuple(int(x) for x in path))

    def digest(self) -> bytes:
        h = hashlib.sha256()
        h.update(_DOMAIN)
        h.update(struct.pack("<Q", self.master))
        h.update(struct.pack("<Q", len(self.path)))
        for x in self.path:
            h.update(struct.pack("<Q", x))
        return h.digest()

    def stream_id(self) -> int:
        """Stable 64-bit identifier for logs and result tables."""
        return struct.unpack("<Q", self.digest()[:8])[0]

    def generator(self) -> np.random.Generator:
        """Fresh PCG64 generator for this stream; every call restarts it."""
        seed_int = int.from_bytes(self.digest(), "little")
        return np.random.Generator(np.random.PCG64(seed_int))
