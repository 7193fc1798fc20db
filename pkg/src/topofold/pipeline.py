"""End-to-end approximation: sweep, critical points, diagram."""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from .critical import CriticalPoints, extract_critical_points
from .field import FieldState
from .grid import GridHierarchy, build_hierarchy
from .pairing import PersistenceDiagram, compute_diagram
from .traversal import FoldingPolicy, PolarityState, TIStatistics, sweep, ti_statistics


@dataclass
class ApproximationResult:
    field: FieldState
    polarity: PolarityState
    critical: CriticalPoints
    diagram: PersistenceDiagram
    policy: FoldingPolicy
    ti: TIStatistics
    timings: dict[str, float] = dc_field(default_factory=dict)


def make_policy(state: FieldState, epsilon_percent: float = 0.0, epsilon_abs=None) -> FoldingPolicy:
    if epsilon_abs is not None:
        return FoldingPolicy.from_absolute(epsilon_abs, state.value_range)
    return FoldingPolicy.from_percent(epsilon_percent, state.value_range)


def approximate(
    values,
    hierarchy: GridHierarchy | None = None,
    epsilon_percent: float = 0.0,
    epsilon_abs: float | None = None,
    pairs: str = "both",
    threads: int = 1,
    memoize: bool = True,
) -> ApproximationResult:
    """Approximate extremum-saddle diagram of ``values`` within ``epsilon``.

    ``values`` is an array shaped like the grid or an existing
    :class:`FieldState`. The returned diagram is that of the folded field,
    which is within ``epsilon_abs`` of the input in the sup norm.
    """
    state = values if isinstance(values, FieldState) else FieldState.from_values(values)
    h = hierarchy if hierarchy is not None else build_hierarchy(state.dims)
    policy = make_policy(state, epsilon_percent, epsilon_abs)

    t0 = time.perf_counter()
    folded, pol = sweep(h, state, policy, threads=threads)
    t1 = time.perf_counter()
    crit = extract_critical_points(h, folded, pol, threads=threads)
    t2 = time.perf_counter()
    diagram = compute_diagram(
        h, folded, crit, policy.epsilon_abs, pairs=pairs, memoize=memoize, threads=threads
    )
    t3 = time.perf_counter()
    return ApproximationResult(
        field=folded,
        polarity=pol,
        critical=crit,
        diagram=diagram,
        policy=policy,
        ti=ti_statistics(h, pol),
        timings={"traversal": t1 - t0, "critical": t2 - t1, "diagram": t3 - t2, "total": t3 - t0},
    )


def field_array(state: FieldState, approximated: bool = True) -> np.ndarray:
    vals = state.f_hat if approximated else state.f
    return vals.reshape(state.dims)
