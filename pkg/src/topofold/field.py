"""Scalar field state, the vertex total order and vertex folding.

Every comparison in the package goes through the lexicographic key
``(f_hat, monotony, offset)``. ``offset`` is the row-major vertex index, which
is injective, so two distinct vertices never compare equal.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field

import numpy as np

SUPPORTED_DTYPES = tuple(
    np.dtype(t)
    for t in ("f4", "f8", "i1", "i2", "i4", "i8", "u1", "u2", "u4", "u8")
)


class Ordering(enum.IntEnum):
    LESS = -1
    GREATER = 1


@dataclass
class FieldState:
    """Original and approximated scalars plus the offsets that order them.

    All arrays are flat, indexed by finest-grid vertex id.
    """

    dims: tuple[int, ...]
    f: np.ndarray
    f_hat: np.ndarray
    offsets: np.ndarray
    monotony: np.ndarray
    folded: np.ndarray = dc_field(repr=False)

    @classmethod
    def from_values(cls, values, dims=None) -> "FieldState":
        arr = np.asarray(values)
        if dims is None:
            dims = arr.shape
        dims = tuple(int(d) for d in dims)
        if arr.dtype not in SUPPORTED_DTYPES:
            if arr.dtype.kind == "b":
                arr = arr.astype(np.uint8)
            elif arr.dtype.kind in "iu":
                arr = arr.astype(np.int64)
            else:
                arr = arr.astype(np.float64)
        flat = np.ascontiguousarray(arr).reshape(-1)
        if flat.size != int(np.prod(dims)):
            raise ValueError(f"{flat.size} values do not fill a grid of dims {dims}")
        if flat.dtype.kind == "f":
            bad = np.flatnonzero(~np.isfinite(flat))
            if bad.size:
                raise ValueError(
                    f"non-finite scalar value {flat[bad[0]]!r} at vertex {int(bad[0])}"
                )
        n = flat.size
        return cls(
            dims=dims,
            f=flat.copy(),
            f_hat=flat.copy(),
            offsets=np.arange(n, dtype=np.int64),
            monotony=np.zeros(n, dtype=np.int64),
            folded=np.zeros(n, dtype=bool),
        )

    @property
    def dtype(self) -> np.dtype:
        return self.f.dtype

    @property
    def n_vertices(self) -> int:
        return self.f.size

    @property
    def value_range(self) -> tuple[float, float]:
        return float(self.f.min()), float(self.f.max())

    def copy(self) -> "FieldState":
        return FieldState(
            self.dims,
            self.f.copy(),
            self.f_hat.copy(),
            self.offsets.copy(),
            self.monotony.copy(),
            self.folded.copy(),
        )

    def key(self, v: int) -> tuple:
        return (self.f_hat[v], int(self.monotony[v]), int(self.offsets[v]))

    def rank(self) -> np.ndarray:
        """Position of each vertex in the total order (0 = lowest)."""
        order = np.lexsort((self.offsets, self.monotony, self.f_hat))
        rank = np.empty_like(order)
        rank[order] = np.arange(order.size)
        return rank


def compare(a: int, b: int, s: FieldState) -> Ordering:
    if a == b:
        raise ValueError(f"cannot order vertex {a} against itself")
    return Ordering.LESS if s.key(a) < s.key(b) else Ordering.GREATER


def less(s: FieldState, a, b) -> np.ndarray:
    """Vectorized ``compare(a, b) == LESS`` over id arrays."""
    fa, fb = s.f_hat[a], s.f_hat[b]
    ma, mb = s.monotony[a], s.monotony[b]
    return (fa < fb) | (
        (fa == fb) & ((ma < mb) | ((ma == mb) & (s.offsets[a] < s.offsets[b])))
    )


def midpoint(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Midpoint in the values' own dtype; integers round toward -inf."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.dtype.kind == "f":
        mid = 0.5 * a.astype(np.float64) + 0.5 * b.astype(np.float64)
        return mid.astype(a.dtype)
    return (a >> 1) + (b >> 1) + (a & b & 1)


def folding_errors(s: FieldState, n, o0, o1) -> np.ndarray:
    """Distance between ``f(n)`` and the value folding would store at ``n``.

    The stored (dtype-rounded) midpoint is used, so the result is exactly the
    pointwise error a fold introduces, also for integer fields.
    """
    mid = midpoint(s.f_hat[o0], s.f_hat[o1])
    return np.abs(mid.astype(np.float64) - s.f[n].astype(np.float64))


def folding_error(n: int, o0: int, o1: int, s: FieldState) -> float:
    return float(folding_errors(s, np.array([n]), np.array([o0]), np.array([o1]))[0])


def fold_vertices(s: FieldState, n, o0, o1, step: int) -> None:
    """Fold the new vertices ``n`` onto their parent edges, in place.

    ``step`` is ``2**(h - i)`` for level ``i``. The monotony offset of each
    folded vertex is chosen so that it lands strictly between its parents in
    the total order, even when the stored midpoint ties with a parent.
    """
    n = np.asarray(n, dtype=np.int64)
    if n.size == 0:
        return
    o0 = np.asarray(o0, dtype=np.int64)
    o1 = np.asarray(o1, dtype=np.int64)
    swap = less(s, o1, o0)
    lo = np.where(swap, o1, o0)
    hi = np.where(swap, o0, o1)

    v = midpoint(s.f_hat[lo], s.f_hat[hi])
    a, b = s.f_hat[lo], s.f_hat[hi]
    m_lo, m_hi = s.monotony[lo], s.monotony[hi]
    o_n, o_lo, o_hi = s.offsets[n], s.offsets[lo], s.offsets[hi]

    tie_lo = v == a
    tie_hi = v == b
    m = np.zeros(n.size, dtype=np.int64)

    only_lo = tie_lo & ~tie_hi
    m = np.where(only_lo, np.where(o_n > o_lo, m_lo, m_lo + step), m)
    only_hi = tie_hi & ~tie_lo
    m = np.where(only_hi, np.where(o_n < o_hi, m_hi, m_hi - step), m)

    both = tie_lo & tie_hi
    pick = np.where(
        m_lo == m_hi,
        m_lo,
        np.where(o_n > o_lo, m_lo, np.where(o_n < o_hi, m_hi, m_lo + step)),
    )
    m = np.where(both, pick, m)

    s.f_hat[n] = v
    s.monotony[n] = m
    s.folded[n] = True


def fold_vertex(n: int, o0: int, o1: int, level: int, s: FieldState, hierarchy) -> FieldState:
    """Fold a single new vertex; validates it against ``hierarchy``."""
    from .grid import edge_parents

    parents = edge_parents(hierarchy, level, n)
    if set(parents) != {o0, o1}:
        raise ValueError(f"({o0}, {o1}) is not the parent edge of vertex {n}")
    fold_vertices(s, [n], [o0], [o1], 2 ** (hierarchy.depth - level))
    return s
