"""Implicit regular grids, their Kuhn triangulation and the decimation hierarchy.

Vertices are addressed by their row-major (C-order) index in the finest grid.
Axis 0 is the slowest varying axis, matching ``numpy.ravel_multi_index``.

Level ``i`` of a hierarchy of depth ``h`` is the sub-grid of finest vertices
whose coordinates are multiples of ``2**(h - i)``. Level 0 is the coarsest.
Every vertex of level ``i`` with at least one odd level-local coordinate is
*new* at that level and sits at the midpoint of exactly one level ``i - 1``
edge. Nothing about the triangulation is stored: neighbors and link edges
come from the static offset tables below.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np

MAX_DEPTH = 32

_BASE_2D = ((1, 0), (0, 1), (1, 1))
_BASE_3D = ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (1, 0, 1), (0, 1, 1), (1, 1, 1))


def _interleave(base):
    out = []
    for b in base:
        out.append(b)
        out.append(tuple(-x for x in b))
    return tuple(out)


# Canonical neighbor order: +e0, -e0, +e1, -e1, ... then the diagonals.
# Bit k of a polarity mask always refers to OFFSETS[d][k].
OFFSETS = {2: _interleave(_BASE_2D), 3: _interleave(_BASE_3D)}


def _is_chain(points) -> bool:
    pts = sorted(points, key=sum)
    for a, b in zip(pts, pts[1:]):
        diff = [y - x for x, y in zip(a, b)]
        if any(d not in (0, 1) for d in diff) or not any(diff):
            return False
    return all(y - x in (0, 1) for x, y in zip(pts[0], pts[-1]))


def _link_edge_table(dimension: int) -> tuple[tuple[int, int], ...]:
    offs = OFFSETS[dimension]
    zero = (0,) * dimension
    return tuple(
        (i, j)
        for i, j in combinations(range(len(offs)), 2)
        if _is_chain([zero, offs[i], offs[j]])
    )


# Pairs of offset slots (i, j) such that v, v+off_i, v+off_j span a triangle.
LINK_EDGES = {2: _link_edge_table(2), 3: _link_edge_table(3)}


@dataclass(frozen=True)
class GridDims:
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if len(dims) not in (2, 3):
            raise ValueError(f"grids must have 2 or 3 axes, got {len(dims)}")
        if any(d < 2 for d in dims):
            raise ValueError(f"every axis needs at least 2 vertices, got {dims}")

    @property
    def dimension(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return int(np.prod(self.dims))


def _valuation2(n: int) -> int:
    v = 0
    while n % 2 == 0 and n > 0:
        n //= 2
        v += 1
    return v


@dataclass(frozen=True)
class GridHierarchy:
    finest: GridDims
    depth: int
    level_dims: tuple[GridDims, ...]

    @property
    def dimension(self) -> int:
        return self.finest.dimension

    @property
    def n_vertices(self) -> int:
        return self.finest.size

    @property
    def n_neighbors(self) -> int:
        return len(OFFSETS[self.dimension])

    def stride(self, level: int) -> int:
        self._check_level(level)
        return 2 ** (self.depth - level)

    def _check_level(self, level: int) -> None:
        if not 0 <= level <= self.depth:
            raise ValueError(f"level {level} outside hierarchy 0..{self.depth}")

    def coords(self, v: int) -> tuple[int, ...]:
        if not 0 <= v < self.n_vertices:
            raise ValueError(f"vertex id {v} outside grid of {self.n_vertices} vertices")
        return tuple(int(c) for c in np.unravel_index(v, self.finest.dims))

    def vertex_id(self, coords: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(coords), self.finest.dims))

    def local_coords(self, level: int, v: int) -> tuple[int, ...]:
        """Level-local coordinates of ``v``; raises if ``v`` is not on that level."""
        s = self.stride(level)
        c = self.coords(v)
        if any(x % s for x in c):
            raise ValueError(f"vertex {v} at {c} does not exist at level {level}")
        return tuple(x // s for x in c)

    def is_new(self, level: int, v: int) -> bool:
        if level == 0:
            return True
        return any(x % 2 for x in self.local_coords(level, v))


def build_hierarchy(dims, max_levels: int = MAX_DEPTH) -> GridHierarchy:
    """Build the deepest edge-nested hierarchy allowed by ``dims``.

    The depth is capped by the 2-adic valuation of ``axis_count - 1`` on every
    axis, so no padding or resampling is ever needed. Odd-sized edges give a
    single-level hierarchy.
    """
    finest = dims if isinstance(dims, GridDims) else GridDims(tuple(dims))
    if max_levels < 0:
        raise ValueError("max_levels must be non-negative")
    depth = min([max_levels, MAX_DEPTH] + [_valuation2(d - 1) for d in finest.dims])
    levels = [finest]
    for _ in range(depth):
        levels.append(GridDims(tuple((d - 1) // 2 + 1 for d in levels[-1].dims)))
    return GridHierarchy(finest, depth, tuple(reversed(levels)))


def _neighbor_slots(h: GridHierarchy, level: int, v: int) -> list[tuple[int, int]]:
    local = h.local_coords(level, v)
    shape = h.level_dims[level].dims
    s = h.stride(level)
    out = []
    for k, off in enumerate(OFFSETS[h.dimension]):
        c = [a + b for a, b in zip(local, off)]
        if all(0 <= x < n for x, n in zip(c, shape)):
            out.append((k, h.vertex_id([x * s for x in c])))
    return out


def neighbors(h: GridHierarchy, level: int, v: int) -> list[int]:
    """Link vertices of ``v`` at ``level`` in canonical offset order, clipped."""
    return [u for _, u in _neighbor_slots(h, level, v)]


def link_edges(h: GridHierarchy, level: int, v: int) -> list[tuple[int, int]]:
    """Edges of the link of ``v`` as index pairs into ``neighbors(h, level, v)``."""
    slots = [k for k, _ in _neighbor_slots(h, level, v)]
    pos = {k: i for i, k in enumerate(slots)}
    return [(pos[a], pos[b]) for a, b in LINK_EDGES[h.dimension] if a in pos and b in pos]


def edge_parents(h: GridHierarchy, level: int, v: int) -> tuple[int, int]:
    """Endpoints of the coarser edge whose midpoint is the new vertex ``v``."""
    local = h.local_coords(level, v)
    parity = [x % 2 for x in local]
    if level == 0 or not any(parity):
        raise ValueError(f"vertex {v} is not new at level {level}")
    s = h.stride(level)
    o0 = [(x - p) * s for x, p in zip(local, parity)]
    o1 = [(x + p) * s for x, p in zip(local, parity)]
    return h.vertex_id(o0), h.vertex_id(o1)


# ---------------------------------------------------------------------------
# Vectorized whole-level queries. These back the traversal and the critical
# point extraction; the scalar functions above are their reference semantics.


@lru_cache(maxsize=64)
def level_tables(h: GridHierarchy, level: int):
    """Per-level arrays, cached and read-only.

    Returns ``(ids, local, nbr)``: finest ids of the level vertices in
    level-local row-major order, their level-local coordinates ``(N, d)`` and
    the neighbor table ``(N, K)`` of finest ids with ``-1`` where clipped.
    """
    shape = h.level_dims[level].dims
    s = h.stride(level)
    local = np.indices(shape).reshape(len(shape), -1).T.astype(np.int64)
    ids = np.ravel_multi_index(tuple((local * s).T), h.finest.dims).astype(np.int64)
    offs = np.array(OFFSETS[h.dimension], dtype=np.int64)
    cand = local[:, None, :] + offs[None, :, :]
    valid = np.all((cand >= 0) & (cand < np.array(shape)), axis=2)
    cand = np.where(valid[..., None], cand, 0) * s
    nbr = np.ravel_multi_index(tuple(np.moveaxis(cand, 2, 0)), h.finest.dims).astype(np.int64)
    nbr[~valid] = -1
    for a in (ids, local, nbr):
        a.setflags(write=False)
    return ids, local, nbr


@lru_cache(maxsize=64)
def level_parents(h: GridHierarchy, level: int):
    """``(new_ids, o0, o1)`` for every new vertex of ``level``, ascending id order."""
    if level == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    ids, local, _ = level_tables(h, level)
    parity = local % 2
    is_new = parity.any(axis=1)
    s = h.stride(level)
    lo = (local[is_new] - parity[is_new]) * s
    hi = (local[is_new] + parity[is_new]) * s
    new_ids = ids[is_new]
    o0 = np.ravel_multi_index(tuple(lo.T), h.finest.dims).astype(np.int64)
    o1 = np.ravel_multi_index(tuple(hi.T), h.finest.dims).astype(np.int64)
    order = np.argsort(new_ids, kind="stable")
    out = new_ids[order], o0[order], o1[order]
    for a in out:
        a.setflags(write=False)
    return out
