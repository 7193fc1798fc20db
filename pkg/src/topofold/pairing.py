"""Extremum-saddle persistence pairs from critical points.

Minimum/saddle pairs come from backward integral lines seeded at each lower
link component of every saddle; the merge events are replayed in ascending
saddle order with a union-find over minima. Saddle/maximum pairs are
obtained from the same machinery on the reversed order.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
import enum
import io
import json
from dataclasses import dataclass, field as dc_field

import numpy as np

from .critical import CriticalPoints, link_components, valid_masks
from .field import FieldState
from .grid import GridHierarchy, level_tables
from .parallel import chunk_slices

PAIR_SELECTORS = ("min-saddle", "saddle-max", "both")


class PairType(str, enum.Enum):
    MIN_SADDLE = "MinSaddle"
    SADDLE_MAX = "SaddleMax"
    GLOBAL = "Global"


@dataclass(frozen=True)
class MergeTriplet:
    saddle: int
    min_a: int
    min_b: int


@dataclass(frozen=True)
class PersistencePair:
    birth_vertex: int
    death_vertex: int
    birth: float
    death: float
    pair_type: PairType
    certain: bool = True

    @property
    def persistence(self) -> float:
        return float(self.death) - float(self.birth)


@dataclass
class PersistenceDiagram:
    pairs: list[PersistencePair]
    epsilon_abs: float = 0.0
    field_range: tuple[float, float] = (0.0, 0.0)
    integer_valued: bool = dc_field(default=False, repr=False)

    def __len__(self) -> int:
        return len(self.pairs)

    def of_type(self, *types: PairType) -> list[PersistencePair]:
        return [p for p in self.pairs if p.pair_type in types]

    def points(self, *types: PairType) -> np.ndarray:
        sel = self.of_type(*types) if types else self.pairs
        if not sel:
            return np.zeros((0, 2))
        return np.array([[float(p.birth), float(p.death)] for p in sel], dtype=np.float64)

    def value_multiset(self) -> list[tuple]:
        return sorted((p.pair_type.value, p.birth, p.death) for p in self.pairs)

    def vertex_multiset(self) -> list[tuple]:
        return sorted((p.pair_type.value, p.birth_vertex, p.death_vertex) for p in self.pairs)

    def _fmt(self, x) -> str:
        if self.integer_valued:
            return str(int(x))
        return repr(float(x))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["birth", "death", "birthVertexId", "deathVertexId", "pairType", "certain"])
        for p in self.pairs:
            w.writerow(
                [
                    self._fmt(p.birth),
                    self._fmt(p.death),
                    p.birth_vertex,
                    p.death_vertex,
                    p.pair_type.value,
                    "true" if p.certain else "false",
                ]
            )
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "epsilonAbs": self.epsilon_abs,
            "fieldRange": list(self.field_range),
            "pairs": [
                {
                    "birth": p.birth,
                    "death": p.death,
                    "birthVertexId": p.birth_vertex,
                    "deathVertexId": p.death_vertex,
                    "pairType": p.pair_type.value,
                    "certain": p.certain,
                }
                for p in self.pairs
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"

    @classmethod
    def from_csv(cls, text: str, epsilon_abs: float = 0.0) -> "PersistenceDiagram":
        rows = list(csv.DictReader(io.StringIO(text)))
        pairs = [
            PersistencePair(
                int(r["birthVertexId"]),
                int(r["deathVertexId"]),
                float(r["birth"]),
                float(r["death"]),
                PairType(r["pairType"]),
                r["certain"] == "true",
            )
            for r in rows
        ]
        return cls(pairs, epsilon_abs)


def is_certain(persistence: float, epsilon_abs: float) -> bool:
    return epsilon_abs <= 0.0 or persistence > 2.0 * epsilon_abs


def classify_certainty(d: PersistenceDiagram) -> tuple[int, int]:
    """Counts of (certain, uncertain) pairs at the diagram's epsilon."""
    certain = sum(1 for p in d.pairs if is_certain(p.persistence, d.epsilon_abs))
    return certain, len(d.pairs) - certain


def descent_pointers(h: GridHierarchy, rank: np.ndarray) -> np.ndarray:
    """Lowest neighbor of every finest vertex, or the vertex itself at minima."""
    ids, _, nbr = level_tables(h, h.depth)
    big = np.iinfo(np.int64).max
    nbr_rank = np.where(nbr >= 0, rank[np.where(nbr >= 0, nbr, 0)], big)
    best = np.argmin(nbr_rank, axis=1)
    low = nbr[ids, best]
    return np.where(nbr_rank[ids, best] < rank[ids], low, ids)


def integral_line(start: int, descent: np.ndarray, memo: np.ndarray | None = None) -> int:
    """Follow steepest descent from ``start`` to a minimum.

    ``memo`` holds the terminal minimum of visited vertices (``-1`` when
    unknown); every vertex on the path is recorded so later lines stop early.
    """
    v = int(start)
    path = []
    while descent[v] != v:
        if memo is not None and memo[v] >= 0:
            break
        path.append(v)
        v = int(descent[v])
    end = int(memo[v]) if memo is not None and memo[v] >= 0 else v
    if memo is not None:
        memo[v] = end
        for u in path:
            memo[u] = end
    return end


class _MinimaUnionFind:
    """Union-find keyed by vertex id; each root remembers its oldest minimum."""

    def __init__(self, rank: np.ndarray):
        self.rank = rank
        self.parent: dict[int, int] = {}

    def find(self, x: int) -> int:
        p = self.parent
        p.setdefault(x, x)
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a: int, b: int):
        """Merge; returns the root that lost (the younger minimum) or None."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return None
        old, young = (ra, rb) if self.rank[ra] < self.rank[rb] else (rb, ra)
        self.parent[young] = old
        return young


def _merge_triplets(h, critical: CriticalPoints, counts, rank, descent, memoize, threads):
    _, _, nbr = level_tables(h, h.depth)
    k = h.n_neighbors
    saddles = critical.ids[counts >= 2]
    big = np.iinfo(np.int64).max
    memo = np.full(rank.size, -1, dtype=np.int64) if memoize else None

    def seeds(v):
        row = nbr[v]
        valid = int(valid_masks(row[None, :])[0])
        upper = 0
        for slot in range(k):
            if row[slot] >= 0 and rank[row[slot]] > rank[v]:
                upper |= 1 << slot
        labels, n_lower, _ = link_components(h.dimension, valid, upper)
        best = [(big, -1)] * n_lower
        for slot in range(k):
            c = labels[slot]
            if 0 <= c < n_lower:
                u = int(row[slot])
                if rank[u] < best[c][0]:
                    best[c] = (int(rank[u]), u)
        return [u for _, u in best]

    def work(sl):
        out = []
        for v in saddles[sl]:
            minima = [integral_line(u, descent, memo) for u in seeds(int(v))]
            pivot = minima[0]
            out.extend(MergeTriplet(int(v), pivot, m) for m in minima[1:] if m != pivot)
        return out

    slices = chunk_slices(saddles.size, threads)
    if threads == 1:
        parts = [work(sl) for sl in slices]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, slices))
    triplets = [t for part in parts for t in part]
    triplets.sort(key=lambda t: rank[t.saddle])
    return triplets


def _pairs_from_triplets(triplets, rank):
    uf = _MinimaUnionFind(rank)
    out = []
    for t in triplets:
        young = uf.union(t.min_a, t.min_b)
        if young is not None:
            out.append((young, t.saddle))
    return out


def compute_diagram(
    h: GridHierarchy,
    s: FieldState,
    critical: CriticalPoints,
    epsilon_abs: float = 0.0,
    pairs: str = "both",
    memoize: bool = True,
    threads: int = 1,
) -> PersistenceDiagram:
    """Persistence diagram of ``s.f_hat`` under its (f_hat, monotony, offset) order."""
    if pairs not in PAIR_SELECTORS:
        raise ValueError(f"pairs must be one of {PAIR_SELECTORS}, got {pairs!r}")
    rank = s.rank()
    fv = s.f_hat
    out: list[PersistencePair] = []

    vmin = int(np.argmin(rank))
    vmax = int(np.argmax(rank))
    out.append(_make(vmin, vmax, fv, PairType.GLOBAL, epsilon_abs))

    if pairs in ("min-saddle", "both"):
        descent = descent_pointers(h, rank)
        trip = _merge_triplets(h, critical, critical.lower, rank, descent, memoize, threads)
        for m, sd in _pairs_from_triplets(trip, rank):
            out.append(_make(m, sd, fv, PairType.MIN_SADDLE, epsilon_abs))

    if pairs in ("saddle-max", "both"):
        rev = rank.size - 1 - rank
        descent = descent_pointers(h, rev)
        trip = _merge_triplets(h, critical, critical.upper, rev, descent, memoize, threads)
        for m, sd in _pairs_from_triplets(trip, rev):
            out.append(_make(sd, m, fv, PairType.SADDLE_MAX, epsilon_abs))

    return PersistenceDiagram(
        out,
        float(epsilon_abs),
        (float(fv.min()), float(fv.max())),
        integer_valued=fv.dtype.kind in "iu",
    )


def _make(b, d, fv, kind, eps):
    birth, death = fv[b].item(), fv[d].item()
    return PersistencePair(int(b), int(d), birth, death, kind, is_certain(death - birth, eps))


def with_epsilon(d: PersistenceDiagram, epsilon_abs: float) -> PersistenceDiagram:
    """Same pairs, certainty flags recomputed for another epsilon."""
    pairs = [
        PersistencePair(
            p.birth_vertex, p.death_vertex, p.birth, p.death, p.pair_type,
            is_certain(p.persistence, epsilon_abs),
        )
        for p in d.pairs
    ]
    return PersistenceDiagram(pairs, float(epsilon_abs), d.field_range, d.integer_valued)
