"""Deterministic chunked execution over vertex ranges."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np


def chunk_slices(n: int, parts: int) -> list[slice]:
    parts = max(1, min(parts, n)) if n else 1
    bounds = np.linspace(0, n, parts + 1).astype(int)
    return [slice(int(a), int(b)) for a, b in zip(bounds, bounds[1:])]


def map_chunks(func, n: int, threads: int = 1):
    """Apply ``func`` to contiguous slices of ``range(n)`` and concatenate.

    Results are always joined in slice order, so the output does not depend
    on ``threads``.
    """
    if threads < 1:
        raise ValueError("threads must be >= 1")
    slices = chunk_slices(n, threads)
    if len(slices) == 1:
        return func(slices[0])
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(func, slices))
    return np.concatenate(parts)
