"""Benchmark harness: TI rates, workload and accuracy per dataset and epsilon.

Each dataset is a built-in generator name or a path to a raw volume with a
sidecar header. For every (dataset, seed) the exact diagram is computed once
at epsilon 0 and reused for every epsilon. Timings are reported only.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import synthetic
from .baseline import staircase
from .io import ingest
from .metrics import bottleneck, field_norms, wasserstein
from .pipeline import approximate

EPSILONS = (0.0, 1.0, 5.0, 10.0)
COLUMNS = (
    "dataset",
    "dims",
    "seed",
    "epsilon",
    "ti_percent",
    "needs_criticality",
    "critical_points",
    "time_s",
    "w_inf",
    "w2",
    "l2",
    "linf",
    "pairs",
    "uncertain",
    "staircase_w2",
    "staircase_l2",
)
SUMMARY_COLUMNS = tuple(c for c in COLUMNS if c not in ("seed", "dims")) + ("runs",)


@dataclass(frozen=True)
class Dataset:
    name: str
    values: np.ndarray
    seed: int | None


def load_datasets(sources, dims, seeds) -> list[Dataset]:
    """Expand dataset sources (generator names or file paths) into concrete fields.

    Generators are instantiated once per seed; files are loaded once.
    """
    out = []
    for source in sources:
        if source in synthetic.GENERATORS:
            for seed in seeds:
                out.append(Dataset(source, synthetic.generate(source, dims, seed), seed))
        else:
            state, _ = ingest(source)
            out.append(Dataset(Path(source).name, state.f.reshape(state.dims), None))
    return out


def _run_one(ds: Dataset, epsilons, threads) -> list[dict]:
    values = ds.values
    exact = approximate(values, epsilon_percent=0.0, threads=threads)
    rows = []
    for eps in epsilons:
        t0 = time.perf_counter()
        res = exact if eps == 0 else approximate(values, epsilon_percent=eps, threads=threads)
        elapsed = res.timings["total"] if eps == 0 else time.perf_counter() - t0
        f_hat = res.field.f_hat.reshape(values.shape)
        l2, linf = field_norms(f_hat, values)
        sc_w2 = sc_l2 = 0.0
        if res.policy.epsilon_abs > 0:
            g = staircase(values, res.policy.epsilon_abs)
            sc_w2 = wasserstein(approximate(g).diagram, exact.diagram, 2)
            sc_l2 = field_norms(g, values)[0]
        rows.append(
            {
                "dataset": ds.name,
                "dims": "x".join(str(n) for n in values.shape),
                "seed": "" if ds.seed is None else ds.seed,
                "epsilon": float(eps),
                "ti_percent": res.ti.ti_percent,
                "needs_criticality": res.polarity.n_needs_criticality,
                "critical_points": len(res.critical),
                "time_s": elapsed,
                "w_inf": bottleneck(res.diagram, exact.diagram),
                "w2": wasserstein(res.diagram, exact.diagram, 2),
                "l2": l2,
                "linf": linf,
                "pairs": len(res.diagram),
                "uncertain": sum(not p.certain for p in res.diagram.pairs),
                "staircase_w2": sc_w2,
                "staircase_l2": sc_l2,
            }
        )
    return rows


def run_benchmark(sources, dims=(33, 33), seeds=range(5), epsilons=EPSILONS, threads=1) -> list[dict]:
    rows = []
    for ds in load_datasets(sources, dims, list(seeds)):
        rows.extend(_run_one(ds, epsilons, threads))
    return rows


def summarize(rows: list[dict]) -> list[dict]:
    """Mean of every numeric column per (dataset, epsilon)."""
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        groups.setdefault((r["dataset"], r["epsilon"]), []).append(r)
    out = []
    for (name, eps), grp in groups.items():
        row = {"dataset": name, "epsilon": eps}
        for col in SUMMARY_COLUMNS[2:-1]:
            row[col] = float(np.mean([g[col] for g in grp]))
        row["runs"] = len(grp)
        out.append(row)
    return out


def format_cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def write_csv(rows: list[dict], path, columns=COLUMNS) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([format_cell(r[c]) for c in columns])


def format_table(rows: list[dict], columns=SUMMARY_COLUMNS) -> str:
    cells = [list(columns)] + [[format_cell(r[c]) for c in columns] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
