"""Reference computations: the staircase quantizer and an exact sweep oracle.

The oracle only borrows neighbor queries from :mod:`topofold.grid`; ordering,
union-find and pairing are written out again here so that it can be used to
check the main pipeline.
"""

from __future__ import annotations

import numpy as np

from .grid import GridHierarchy, neighbors
from .pairing import PairType, PersistenceDiagram, PersistencePair


def staircase(f, epsilon_abs: float) -> np.ndarray:
    """Quantize ``f`` into bins of width ``2 * epsilon_abs`` starting at its minimum.

    Every value maps to the center of its half-open bin, clamped to the data
    range. The pointwise error is below ``epsilon_abs`` except for values
    lying exactly on a bin's lower edge (the minimum among them, unless the
    clamp pulls it closer), where it equals ``epsilon_abs`` up to rounding of
    the bin centers.
    """
    if epsilon_abs <= 0:
        raise ValueError(f"staircase needs a positive epsilon, got {epsilon_abs}")
    v = np.asarray(f, dtype=np.float64)
    lo, hi = float(v.min()), float(v.max())
    step = 2.0 * epsilon_abs
    q = lo + (np.floor((v - lo) / step) + 0.5) * step
    return np.clip(q, lo, hi)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root


def _sweep_pairs(order, adjacency):
    seen = [False] * len(order)
    pos = [0] * len(order)
    for i, v in enumerate(order):
        pos[v] = i
    uf = _UnionFind(len(order))
    pairs = []
    for v in order:
        roots = {uf.find(u) for u in adjacency[v] if seen[u]}
        seen[v] = True
        if not roots:
            continue
        # The root of each component is its lowest vertex (its minimum).
        oldest = min(roots, key=pos.__getitem__)
        for r in sorted(roots, key=pos.__getitem__):
            if r != oldest:
                pairs.append((r, v))
                uf.parent[r] = oldest
        uf.parent[v] = oldest
    return pairs


def exact_sweep_diagram(
    values,
    h: GridHierarchy,
    pairs: str = "both",
    tiebreak=None,
) -> PersistenceDiagram:
    """Exact extremum-saddle diagram by a sublevel-set union-find sweep.

    Vertices are ordered by ``(value, tiebreak, vertex id)``; ``tiebreak``
    defaults to zero and lets the oracle replay a folded field together with
    its monotony offsets.
    """
    vals = np.asarray(values).reshape(-1)
    n = vals.size
    if n != h.n_vertices:
        raise ValueError(f"{n} values for a grid of {h.n_vertices} vertices")
    tb = np.zeros(n, dtype=np.int64) if tiebreak is None else np.asarray(tiebreak).reshape(-1)
    ids = np.arange(n)
    order = [int(v) for v in np.lexsort((ids, tb, vals))]
    adjacency = [neighbors(h, h.depth, v) for v in range(n)]

    out = [_pair(order[0], order[-1], vals, PairType.GLOBAL)]
    if pairs in ("min-saddle", "both"):
        for m, sd in _sweep_pairs(order, adjacency):
            out.append(_pair(m, sd, vals, PairType.MIN_SADDLE))
    if pairs in ("saddle-max", "both"):
        for m, sd in _sweep_pairs(order[::-1], adjacency):
            out.append(_pair(sd, m, vals, PairType.SADDLE_MAX))
    return PersistenceDiagram(
        out, 0.0, (float(vals.min()), float(vals.max())), integer_valued=vals.dtype.kind in "iu"
    )


def _pair(b, d, vals, kind):
    return PersistencePair(int(b), int(d), vals[b].item(), vals[d].item(), kind, True)
