"""Seeded random streams and worker limits.

Every random draw in the package goes through :func:`make_rng`, a Philox
(counter-based) generator keyed by ``(seed, stream)``.  Distinct streams
give independent, reproducible probe sets.
"""

from __future__ import annotations

import os
import zlib

import numpy as np


def _stream_id(stream: str | int) -> int:
    if isinstance(stream, int):
        return stream
    return zlib.crc32(stream.encode("utf-8"))


def make_rng(seed: int, stream: str | int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFF, _stream_id(stream)])
    return np.random.Generator(np.random.Philox(ss))


def max_workers() -> int:
    """Worker cap from ``NONLOCAL_THREADS`` (default 1)."""
    raw = os.environ.get("NONLOCAL_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(1, value)
