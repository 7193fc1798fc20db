"""Coarse-to-fine sweep: link polarity, vertex folding and TI bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .field import FieldState, fold_vertices, folding_errors, less
from .grid import GridHierarchy, level_parents, level_tables
from .parallel import map_chunks

UNKNOWN, REGULAR, DIRTY = 0, 1, 2


@dataclass(frozen=True)
class FoldingPolicy:
    epsilon_percent: float
    epsilon_abs: float

    @classmethod
    def from_percent(cls, epsilon_percent: float, value_range) -> "FoldingPolicy":
        if not 0.0 <= epsilon_percent <= 100.0:
            raise ValueError(f"epsilon must be a percentage in [0, 100], got {epsilon_percent}")
        lo, hi = value_range
        return cls(float(epsilon_percent), epsilon_percent / 100.0 * (float(hi) - float(lo)))

    @classmethod
    def from_absolute(cls, epsilon_abs: float, value_range) -> "FoldingPolicy":
        if epsilon_abs < 0:
            raise ValueError(f"absolute epsilon must be >= 0, got {epsilon_abs}")
        lo, hi = value_range
        span = float(hi) - float(lo)
        pct = 100.0 * epsilon_abs / span if span > 0 else 0.0
        return cls(pct, float(epsilon_abs))

    @property
    def fold_all(self) -> bool:
        return self.epsilon_percent >= 100.0

    def should_fold(self, delta: np.ndarray) -> np.ndarray:
        if self.epsilon_abs <= 0.0:
            return np.zeros(delta.shape, dtype=bool)
        if self.fold_all:
            return delta <= self.epsilon_abs
        return delta < self.epsilon_abs


@dataclass
class LevelStats:
    level: int
    n_vertices: int
    n_new: int
    non_monotonic: int
    folded: int
    ti_old: int
    ti_new: int

    @property
    def n_old(self) -> int:
        return self.n_vertices - self.n_new

    @property
    def ti(self) -> int:
        return self.ti_old + self.ti_new


@dataclass
class PolarityState:
    """Link polarity of each vertex plus the regular/dirty certification.

    ``polarity[v]`` has bit ``k`` set when neighbor slot ``k`` of ``v`` is in
    its upper link. ``state`` is one of ``UNKNOWN``, ``REGULAR``, ``DIRTY``.
    """

    polarity: np.ndarray
    known: np.ndarray
    state: np.ndarray
    levels: list[LevelStats] = dc_field(default_factory=list)

    @property
    def needs_criticality(self) -> np.ndarray:
        return self.state != REGULAR

    @property
    def n_needs_criticality(self) -> int:
        return int(np.count_nonzero(self.needs_criticality))


def polarity_bits(s: FieldState, ids: np.ndarray, nbr: np.ndarray) -> np.ndarray:
    """Polarity masks of ``ids`` from scratch, given their neighbor rows."""
    bits = np.zeros(ids.size, dtype=np.uint16)
    for k in range(nbr.shape[1]):
        col = nbr[:, k]
        ok = col >= 0
        up = np.zeros(ids.size, dtype=bool)
        up[ok] = less(s, ids[ok], col[ok])
        bits |= up.astype(np.uint16) << np.uint16(k)
    return bits


def sweep(
    h: GridHierarchy,
    s: FieldState,
    policy: FoldingPolicy,
    threads: int = 1,
) -> tuple[FieldState, PolarityState]:
    """Traverse ``h`` coarse to fine, folding vertices and tracking polarity.

    Returns a folded copy of ``s`` and the final polarity state. Folding at a
    level only reads parent values, which were fixed at earlier levels, so
    the outcome is independent of processing order and thread count.
    """
    s = s.copy()
    n = s.n_vertices
    pol = PolarityState(
        polarity=np.zeros(n, dtype=np.uint16),
        known=np.zeros(n, dtype=bool),
        state=np.full(n, UNKNOWN, dtype=np.int8),
    )
    ids0, _, nbr0 = level_tables(h, 0)
    pol.polarity[ids0] = map_chunks(
        lambda sl: polarity_bits(s, ids0[sl], nbr0[sl]), ids0.size, threads
    )
    pol.known[ids0] = True
    pol.state[ids0] = DIRTY

    for level in range(1, h.depth + 1):
        pol.levels.append(_process_level(h, s, pol, policy, level, threads))
    return s, pol


def _process_level(h, s, pol, policy, level, threads) -> LevelStats:
    ids, _, nbr = level_tables(h, level)
    new_ids, o0, o1 = level_parents(h, level)
    step = 2 ** (h.depth - level)

    def monotonic(sl):
        a, b, c = o0[sl], o1[sl], new_ids[sl]
        return (less(s, a, c) & less(s, c, b)) | (less(s, b, c) & less(s, c, a))

    mono = map_chunks(monotonic, new_ids.size, threads)
    candidates = np.flatnonzero(~mono)
    delta = folding_errors(s, new_ids[candidates], o0[candidates], o1[candidates])
    fold = candidates[policy.should_fold(delta)]
    fold_vertices(s, new_ids[fold], o0[fold], o1[fold], step)
    mono_after = map_chunks(monotonic, new_ids.size, threads)

    # Monotony flags indexed by finest id for neighbor lookups.
    is_nonmono = np.zeros(s.n_vertices, dtype=bool)
    is_nonmono[new_ids[~mono_after]] = True
    is_new = np.zeros(s.n_vertices, dtype=bool)
    is_new[new_ids] = True

    row_of = np.full(s.n_vertices, -1, dtype=np.int64)
    row_of[ids] = np.arange(ids.size)

    # New vertices: fresh polarity; TI when they and all new neighbors are monotonic.
    new_rows = row_of[new_ids]
    new_nbr = nbr[new_rows]
    pol.polarity[new_ids] = map_chunks(
        lambda sl: polarity_bits(s, new_ids[sl], new_nbr[sl]), new_ids.size, threads
    )
    pol.known[new_ids] = True
    safe = np.where(new_nbr >= 0, new_nbr, 0)
    bad_nbr = ((new_nbr >= 0) & is_new[safe] & is_nonmono[safe]).any(axis=1)
    ti_new = mono_after & ~bad_nbr
    pol.state[new_ids] = np.where(ti_new, REGULAR, DIRTY)

    # Old vertices: only bits facing a non-monotonic new neighbor can flip.
    old_ids = ids[~is_new[ids]]
    old_nbr = nbr[row_of[old_ids]]
    before = pol.polarity[old_ids].copy()
    after = before.copy()
    for k in range(nbr.shape[1]):
        col = old_nbr[:, k]
        hit = np.flatnonzero((col >= 0) & is_nonmono[np.where(col >= 0, col, 0)])
        if hit.size == 0:
            continue
        up = less(s, old_ids[hit], col[hit])
        mask = np.uint16(1 << k)
        after[hit] = np.where(up, after[hit] | mask, after[hit] & ~mask)
    pol.polarity[old_ids] = after
    changed = after != before
    pol.state[old_ids[changed]] = DIRTY

    return LevelStats(
        level=level,
        n_vertices=int(ids.size),
        n_new=int(new_ids.size),
        non_monotonic=int(np.count_nonzero(~mono_after)),
        folded=int(fold.size),
        ti_old=int(np.count_nonzero(~changed)),
        ti_new=int(np.count_nonzero(ti_new)),
    )


@dataclass(frozen=True)
class TIStatistics:
    per_level: tuple[dict, ...]
    total_vertices: int
    ti_vertices: int
    ti_percent: float
    new_ti_percent: float
    folded: int
    non_monotonic: int


def ti_statistics(h: GridHierarchy, p: PolarityState) -> TIStatistics:
    """TI counts per level and overall.

    The overall percentage is taken over the vertices of every level,
    coarsest included, so repeated vertices count once per level.
    """
    total = sum(int(np.prod(d.dims)) for d in h.level_dims) if h.depth > 0 else 0
    rows = tuple(
        {
            "level": st.level,
            "vertices": st.n_vertices,
            "new": st.n_new,
            "non_monotonic": st.non_monotonic,
            "folded": st.folded,
            "ti_old": st.ti_old,
            "ti_new": st.ti_new,
            "ti_percent": 100.0 * st.ti / st.n_vertices,
        }
        for st in p.levels
    )
    ti = sum(st.ti for st in p.levels)
    n_new = sum(st.n_new for st in p.levels)
    ti_new = sum(st.ti_new for st in p.levels)
    return TIStatistics(
        per_level=rows,
        total_vertices=total,
        ti_vertices=ti,
        ti_percent=100.0 * ti / total if total else 0.0,
        new_ti_percent=100.0 * ti_new / n_new if n_new else 0.0,
        folded=sum(st.folded for st in p.levels),
        non_monotonic=sum(st.non_monotonic for st in p.levels),
    )
