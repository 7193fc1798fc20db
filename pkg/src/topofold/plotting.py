"""Matplotlib figures for reports: diagrams and benchmark summaries."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .pairing import PairType, PersistenceDiagram  # noqa: E402
from .render import COLORS  # noqa: E402

_SAVE = {"dpi": 120, "metadata": {"Software": None}}


def plot_diagram(d: PersistenceDiagram, path, reference: PersistenceDiagram | None = None):
    """Scatter plot of ``d`` with its uncertainty band, optionally over ``reference``."""
    fig, ax = plt.subplots(figsize=(5, 5))
    lo, hi = (float(v) for v in d.field_range)
    if hi <= lo:
        hi = lo + 1.0
    eps = float(d.epsilon_abs)
    ax.plot([lo, hi], [lo, hi], color="black", lw=1)
    if eps > 0:
        ax.fill_between([lo, hi], [lo, hi], [lo + 2 * eps, hi + 2 * eps], color="#d62728", alpha=0.25, lw=0)
    if reference is not None:
        pts = reference.points()
        if pts.size:
            ax.scatter(pts[:, 0], pts[:, 1], s=40, facecolors="none", edgecolors="#999999", label="exact")
    for kind in (PairType.MIN_SADDLE, PairType.SADDLE_MAX, PairType.GLOBAL):
        pts = d.points(kind)
        if pts.size:
            ax.scatter(pts[:, 0], pts[:, 1], s=12, color=COLORS[kind], label=kind.value)
    ax.set_xlabel("Birth")
    ax.set_ylabel("Death")
    ax.set_aspect("equal")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)


def plot_benchmark(summary: list[dict], path):
    """TI% against epsilon, and ours vs staircase W2, one line per dataset."""
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(10, 4))
    datasets = sorted({r["dataset"] for r in summary})
    for name in datasets:
        rows = sorted((r for r in summary if r["dataset"] == name), key=lambda r: r["epsilon"])
        eps = [r["epsilon"] for r in rows]
        ax0.plot(eps, [r["ti_percent"] for r in rows], marker="o", label=name)
        line = ax1.plot(eps, [r["w2"] for r in rows], marker="o", label=f"{name} ours")[0]
        ax1.plot(
            eps,
            [r["staircase_w2"] for r in rows],
            marker="s",
            ls="--",
            color=line.get_color(),
            label=f"{name} staircase",
        )
    ax0.set_xlabel("epsilon (% of range)")
    ax0.set_ylabel("TI vertices (%)")
    ax0.legend(fontsize=8)
    ax1.set_xlabel("epsilon (% of range)")
    ax1.set_ylabel("W2 to exact diagram")
    ax1.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)
