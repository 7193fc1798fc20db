"""Distances between persistence diagrams and between scalar fields.

Diagrams may be passed as ``(n, 2)`` arrays of ``(birth, death)`` points or
as :class:`~topofold.pairing.PersistenceDiagram`. For the latter, each pair
type is matched separately; bottleneck takes the max over types and
Wasserstein sums the ``q``-th powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .pairing import PairType, PersistenceDiagram, classify_certainty

_TYPES = (PairType.MIN_SADDLE, PairType.SADDLE_MAX, PairType.GLOBAL)


def _as_points(d) -> np.ndarray:
    pts = np.asarray(d, dtype=np.float64)
    if pts.size == 0:
        return np.zeros((0, 2))
    return pts.reshape(-1, 2)


def diagonal_projection(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    m = 0.5 * (a[..., 0] + a[..., 1])
    return np.stack([m, m], axis=-1)


def point_distance(a, b, q=2) -> float:
    """``d_q`` between two diagram points; zero when both lie on the diagonal."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a[0] == a[1] and b[0] == b[1]:
        return 0.0
    diff = np.abs(a - b)
    if q == math.inf:
        return float(diff.max())
    return float((diff**q).sum() ** (1.0 / q))


def _pairwise(a, b, q):
    diff = np.abs(a[:, None, :] - b[None, :, :])
    if q == math.inf:
        d = diff.max(axis=2)
    else:
        d = (diff**q).sum(axis=2) ** (1.0 / q)
    both_diag = (a[:, None, 0] == a[:, None, 1]) & (b[None, :, 0] == b[None, :, 1])
    return np.where(both_diag, 0.0, d)


def _to_diagonal(a, q):
    half = 0.5 * np.abs(a[:, 1] - a[:, 0])
    if q == math.inf:
        return half
    return half * 2.0 ** (1.0 / q)


def _wasserstein_points(a, b, q):
    n, m = len(a), len(b)
    if n + m == 0:
        return 0.0
    big = np.inf
    cost = np.zeros((n + m, m + n))
    cost[:n, :m] = _pairwise(a, b, q) ** q
    da = np.full((n, n), big)
    np.fill_diagonal(da, _to_diagonal(a, q) ** q)
    cost[:n, m:] = da
    db = np.full((m, m), big)
    np.fill_diagonal(db, _to_diagonal(b, q) ** q)
    cost[n:, :m] = db
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum() ** (1.0 / q))


def _max_matching_size(adj: np.ndarray) -> int:
    if adj.size == 0 or not adj.any():
        return 0
    match = maximum_bipartite_matching(csr_matrix(adj.astype(np.int8)), perm_type="column")
    return int(np.count_nonzero(match >= 0))


def _feasible(dist, half_a, half_b, t) -> bool:
    # A matching covering every point that cannot reach the diagonal exists
    # iff one covers the strong points of each side (Mendelsohn-Dulmage).
    adj = dist <= t
    strong_a = half_a > t
    strong_b = half_b > t
    if _max_matching_size(adj[strong_a, :]) < strong_a.sum():
        return False
    return _max_matching_size(adj[:, strong_b].T) >= strong_b.sum()


def bottleneck_matching(a, b):
    """Exact bottleneck distance between point sets and an optimal matching.

    Returns ``(distance, matching)`` where ``matching`` is a list of
    ``(i, j)`` index pairs; ``j == -1`` sends ``a[i]`` to the diagonal and
    ``i == -1`` sends ``b[j]`` to the diagonal.
    """
    a, b = _as_points(a), _as_points(b)
    n, m = len(a), len(b)
    if n + m == 0:
        return 0.0, []
    dist = _pairwise(a, b, math.inf)
    half_a = _to_diagonal(a, math.inf)
    half_b = _to_diagonal(b, math.inf)
    cand = np.unique(np.concatenate([dist.ravel(), half_a, half_b, [0.0]]))
    lo, hi = 0, cand.size - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _feasible(dist, half_a, half_b, cand[mid]):
            hi = mid
        else:
            lo = mid + 1
    t = float(cand[lo])
    return t, _matching_at(dist, half_a, half_b, t)


def _matching_at(dist, half_a, half_b, t):
    n, m = dist.shape
    # Augmented graph: rows = a + diag(b), cols = b + diag(a).
    adj = np.zeros((n + m, m + n), dtype=bool)
    adj[:n, :m] = dist <= t
    adj[np.arange(n), m + np.arange(n)] = half_a <= t
    adj[n + np.arange(m), np.arange(m)] = half_b <= t
    adj[n:, m:] = True
    match = maximum_bipartite_matching(csr_matrix(adj.astype(np.int8)), perm_type="column")
    out = []
    for i in range(n):
        j = int(match[i])
        out.append((i, j if j < m else -1))
    matched_b = {j for _, j in out if j >= 0}
    out.extend((-1, j) for j in range(m) if j not in matched_b)
    return out


def _by_type(d):
    if isinstance(d, PersistenceDiagram):
        return {t: d.points(t) for t in _TYPES}
    return None


def bottleneck(d1, d2) -> float:
    t1, t2 = _by_type(d1), _by_type(d2)
    if t1 is None or t2 is None:
        return bottleneck_matching(_pts(d1), _pts(d2))[0]
    return max(bottleneck_matching(t1[t], t2[t])[0] for t in _TYPES)


def wasserstein(d1, d2, q=2) -> float:
    if q == math.inf:
        return bottleneck(d1, d2)
    t1, t2 = _by_type(d1), _by_type(d2)
    if t1 is None or t2 is None:
        return _wasserstein_points(_pts(d1), _pts(d2), q)
    total = sum(_wasserstein_points(t1[t], t2[t], q) ** q for t in _TYPES)
    return float(total ** (1.0 / q))


def _pts(d):
    if isinstance(d, PersistenceDiagram):
        return d.points()
    return _as_points(d)


def field_norms(f, g) -> tuple[float, float]:
    """Unnormalized L2 and the L-infinity distance between two fields."""
    a = np.asarray(f, dtype=np.float64)
    b = np.asarray(g, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"field shapes differ: {a.shape} vs {b.shape}")
    diff = a - b
    if diff.size == 0:
        return 0.0, 0.0
    return float(np.sqrt(np.sum(diff * diff))), float(np.max(np.abs(diff)))


@dataclass(frozen=True)
class DiagramMetricReport:
    method: str
    w_inf: float
    w2: float
    field_l2: float
    field_linf: float
    pairs: int
    uncertain: int
    exact_pairs: int

    def as_row(self) -> dict:
        return asdict(self)


def compare_to_exact(method, approx: PersistenceDiagram, exact: PersistenceDiagram, f_approx, f):
    l2, linf = field_norms(f_approx, f)
    _, uncertain = classify_certainty(approx)
    return DiagramMetricReport(
        method=method,
        w_inf=bottleneck(approx, exact),
        w2=wasserstein(approx, exact, 2),
        field_l2=l2,
        field_linf=linf,
        pairs=len(approx),
        uncertain=uncertain,
        exact_pairs=len(exact),
    )
