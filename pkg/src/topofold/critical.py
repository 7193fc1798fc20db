"""Criticality of vertices from the connected components of their links."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .field import FieldState
from .grid import LINK_EDGES, GridHierarchy, level_tables
from .parallel import map_chunks
from .traversal import PolarityState, polarity_bits


class CriticalType(str, enum.Enum):
    MINIMUM = "minimum"
    SADDLE1 = "saddle1"
    SADDLE2 = "saddle2"
    MAXIMUM = "maximum"
    REGULAR = "regular"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class Criticality:
    kind: CriticalType
    lower_components: int
    upper_components: int


class _SlotUnionFind:
    """Union-find over at most 14 link slots."""

    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@lru_cache(maxsize=1 << 16)
def link_components(dimension: int, valid_mask: int, upper_mask: int):
    """Label lower and upper link components for one polarity pattern.

    Returns ``(labels, n_lower, n_upper)`` where ``labels[k]`` is the
    component id of slot ``k`` (lower components numbered first, ``-1`` for
    clipped slots). Components are numbered in order of their smallest slot.
    """
    k_max = 6 if dimension == 2 else 14
    uf = _SlotUnionFind(k_max)
    for a, b in LINK_EDGES[dimension]:
        if (valid_mask >> a) & 1 and (valid_mask >> b) & 1:
            if ((upper_mask >> a) & 1) == ((upper_mask >> b) & 1):
                uf.union(a, b)
    labels = [-1] * k_max
    lower_roots: dict[int, int] = {}
    upper_roots: dict[int, int] = {}
    for k in range(k_max):
        if not (valid_mask >> k) & 1:
            continue
        r = uf.find(k)
        table = upper_roots if (upper_mask >> k) & 1 else lower_roots
        table.setdefault(r, len(table))
    for k in range(k_max):
        if not (valid_mask >> k) & 1:
            continue
        r = uf.find(k)
        if (upper_mask >> k) & 1:
            labels[k] = len(lower_roots) + upper_roots[r]
        else:
            labels[k] = lower_roots[r]
    return tuple(labels), len(lower_roots), len(upper_roots)


def criticality_from_counts(dimension: int, lower: int, upper: int) -> Criticality:
    if lower == 0:
        kind = CriticalType.MINIMUM
    elif upper == 0:
        kind = CriticalType.MAXIMUM
    elif lower == 1 and upper == 1:
        kind = CriticalType.REGULAR
    elif dimension == 2:
        kind = CriticalType.SADDLE1
    elif lower >= 2 and upper >= 2:
        kind = CriticalType.DEGENERATE
    elif lower >= 2:
        kind = CriticalType.SADDLE1
    else:
        kind = CriticalType.SADDLE2
    return Criticality(kind, lower, upper)


def valid_masks(nbr: np.ndarray) -> np.ndarray:
    weights = (1 << np.arange(nbr.shape[1], dtype=np.int64))
    return ((nbr >= 0).astype(np.int64) * weights).sum(axis=1)


def classify(v: int, h: GridHierarchy, s: FieldState) -> Criticality:
    """Classify vertex ``v`` of the finest level from scratch."""
    _, _, nbr = level_tables(h, h.depth)
    row = nbr[v : v + 1]
    bits = int(polarity_bits(s, np.array([v]), row)[0])
    _, lower, upper = link_components(h.dimension, int(valid_masks(row)[0]), bits)
    return criticality_from_counts(h.dimension, lower, upper)


def component_counts(h: GridHierarchy, ids: np.ndarray, polarity: np.ndarray):
    """Lower/upper component counts for many vertices of the finest level."""
    _, _, nbr = level_tables(h, h.depth)
    k = h.n_neighbors
    keys = (valid_masks(nbr[ids]) << k) | polarity.astype(np.int64)
    uniq, inv = np.unique(keys, return_inverse=True)
    counts = np.array(
        [link_components(h.dimension, int(u >> k), int(u & ((1 << k) - 1)))[1:] for u in uniq],
        dtype=np.int64,
    ).reshape(-1, 2)
    per = counts[inv.reshape(-1)]
    return per[:, 0], per[:, 1]


@dataclass(frozen=True)
class CriticalPoints:
    """Non-regular vertices of the finest level, ascending by id."""

    ids: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    dimension: int

    def __len__(self) -> int:
        return int(self.ids.size)

    def items(self) -> list[tuple[int, Criticality]]:
        return [
            (int(v), criticality_from_counts(self.dimension, int(lo), int(up)))
            for v, lo, up in zip(self.ids, self.lower, self.upper)
        ]

    def count(self, kind: CriticalType) -> int:
        return sum(1 for _, c in self.items() if c.kind == kind)


def extract_critical_points(
    h: GridHierarchy,
    s: FieldState,
    p: PolarityState,
    threads: int = 1,
) -> CriticalPoints:
    """Classify every vertex the sweep could not certify as regular."""
    cand = np.flatnonzero(p.needs_criticality)

    def work(sl):
        lo, up = component_counts(h, cand[sl], p.polarity[cand[sl]])
        return np.stack([lo, up], axis=1) if lo.size else np.zeros((0, 2), dtype=np.int64)

    counts = map_chunks(work, cand.size, threads).reshape(-1, 2)
    lower, upper = counts[:, 0], counts[:, 1]
    keep = ~((lower == 1) & (upper == 1))
    return CriticalPoints(cand[keep], lower[keep], upper[keep], h.dimension)


def classify_all(h: GridHierarchy, s: FieldState) -> CriticalPoints:
    """Classify every finest vertex from scratch, without any sweep."""
    ids, _, nbr = level_tables(h, h.depth)
    bits = polarity_bits(s, ids, nbr)
    lower, upper = component_counts(h, ids, bits)
    keep = ~((lower == 1) & (upper == 1))
    return CriticalPoints(ids[keep], lower[keep], upper[keep], h.dimension)
