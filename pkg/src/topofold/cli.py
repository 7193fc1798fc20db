"""Command line entry point.

Single run::

    topofold --input vol.raw --epsilon 5 --out-diagram d.csv --out-svg d.svg --compare --baseline

Benchmark::

    topofold --benchmark --bench-datasets bump-noise,uniform-noise --bench-dims 33,33 --report-dir out
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from . import benchmark as bench
from . import synthetic
from .baseline import exact_sweep_diagram, staircase
from .field import FieldState
from .grid import MAX_DEPTH, build_hierarchy
from .io import ingest, write_volume
from .metrics import compare_to_exact
from .pairing import PAIR_SELECTORS, with_epsilon
from .pipeline import approximate
from .render import render_svg

REPORT_COLUMNS = ("method", "w_inf", "w2", "field_l2", "field_linf", "pairs", "uncertain", "exact_pairs")


@dataclass
class RunConfig:
    input: str | None = None
    header: str | None = None
    synthetic: str | None = None
    dims: tuple[int, ...] = (33, 33)
    seed: int = 0
    epsilon_percent: float = 0.0
    epsilon_abs: float | None = None
    pairs: str = "both"
    threads: int = 1
    max_levels: int = MAX_DEPTH
    compare: bool = False
    baseline: bool = False
    out_diagram: str | None = None
    out_field: str | None = None
    out_svg: str | None = None
    out_report: str | None = None
    out_plot: str | None = None

    def __post_init__(self):
        if not 0.0 <= self.epsilon_percent <= 100.0:
            raise ValueError(f"epsilon must be within [0, 100] percent, got {self.epsilon_percent}")
        if self.epsilon_abs is not None and self.epsilon_abs < 0:
            raise ValueError(f"epsilon-abs must be non-negative, got {self.epsilon_abs}")
        if self.threads < 1:
            raise ValueError(f"threads must be at least 1, got {self.threads}")
        if self.pairs not in PAIR_SELECTORS:
            raise ValueError(f"pairs must be one of {PAIR_SELECTORS}, got {self.pairs!r}")
        if (self.input is None) == (self.synthetic is None):
            raise ValueError("give exactly one of --input or --synthetic")


@dataclass
class RunArtifacts:
    result: object
    report: list[dict] = dc_field(default_factory=list)
    files: list[str] = dc_field(default_factory=list)


def _load(config: RunConfig):
    if config.input is not None:
        return ingest(config.input, config.header, config.max_levels)
    values = synthetic.generate(config.synthetic, config.dims, config.seed)
    state = FieldState.from_values(values)
    return state, build_hierarchy(state.dims, config.max_levels)


def _write_diagram(diagram, path) -> None:
    text = diagram.to_json() if str(path).endswith(".json") else diagram.to_csv()
    Path(path).write_text(text)


def _write_report(rows, path) -> None:
    if str(path).endswith(".json"):
        Path(path).write_text(json.dumps(rows, indent=2) + "\n")
        return
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for r in rows:
            w.writerow([bench.format_cell(r[c]) for c in REPORT_COLUMNS])


def run(config: RunConfig) -> RunArtifacts:
    """Approximate one field and write every requested artifact."""
    state, h = _load(config)
    res = approximate(
        state,
        h,
        epsilon_percent=config.epsilon_percent,
        epsilon_abs=config.epsilon_abs,
        pairs=config.pairs,
        threads=config.threads,
    )
    art = RunArtifacts(res)
    values = state.f.reshape(state.dims)
    f_hat = res.field.f_hat.reshape(state.dims)
    if config.compare or config.baseline:
        exact = exact_sweep_diagram(values, h, pairs=config.pairs)
        art.report.append(compare_to_exact("ours", res.diagram, exact, f_hat, values).as_row())
        if config.baseline:
            eps = res.policy.epsilon_abs
            g = staircase(values, eps) if eps > 0 else values
            dg = with_epsilon(exact_sweep_diagram(g, h, pairs=config.pairs), eps)
            art.report.append(compare_to_exact("staircase", dg, exact, g, values).as_row())
    if config.out_diagram:
        _write_diagram(res.diagram, config.out_diagram)
        art.files.append(config.out_diagram)
    if config.out_field:
        write_volume(config.out_field, f_hat, name="approximated")
        art.files.append(config.out_field)
    if config.out_svg:
        render_svg(res.diagram, config.out_svg)
        art.files.append(config.out_svg)
    if config.out_plot:
        from .plotting import plot_diagram

        plot_diagram(res.diagram, config.out_plot)
        art.files.append(config.out_plot)
    if config.out_report and art.report:
        _write_report(art.report, config.out_report)
        art.files.append(config.out_report)
    return art


def run_benchmark_report(datasets, dims, seeds, epsilons, threads, report_dir) -> dict:
    """Run the benchmark and write CSVs, a text table and a figure."""
    from .plotting import plot_benchmark

    out = Path(report_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = bench.run_benchmark(datasets, dims, seeds, epsilons, threads)
    summary = bench.summarize(rows)
    bench.write_csv(rows, out / "benchmark.csv")
    bench.write_csv(summary, out / "benchmark_summary.csv", bench.SUMMARY_COLUMNS)
    table = bench.format_table(summary)
    (out / "benchmark.txt").write_text(table)
    plot_benchmark(summary, out / "benchmark.png")
    return {"rows": rows, "summary": summary, "table": table}


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.split(",") if t)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(",") if t)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="topofold",
        description="Approximate extremum-saddle persistence diagrams of grid scalar fields.",
    )
    src = p.add_argument_group("input")
    src.add_argument("--input", help="raw little-endian volume")
    src.add_argument("--header", help="JSON header (default: <input>.json)")
    src.add_argument("--synthetic", choices=sorted(synthetic.GENERATORS), help="use a built-in field")
    src.add_argument("--dims", type=_ints, default=(33, 33), help="grid size for --synthetic, e.g. 33,33")
    src.add_argument("--seed", type=int, default=0, help="seed for synthetic fields")
    src.add_argument("--max-levels", type=int, default=MAX_DEPTH)
    alg = p.add_argument_group("approximation")
    alg.add_argument("--epsilon", type=float, default=0.0, help="error bound in percent of the range")
    alg.add_argument("--epsilon-abs", type=float, help="absolute error bound (overrides --epsilon)")
    alg.add_argument("--pairs", choices=PAIR_SELECTORS, default="both")
    alg.add_argument("--threads", type=int, default=1)
    out = p.add_argument_group("outputs")
    out.add_argument("--out-diagram", help="diagram CSV, or JSON if the name ends in .json")
    out.add_argument("--out-field", help="approximated field as raw volume plus header")
    out.add_argument("--out-svg", help="SVG diagram with uncertainty glyphs")
    out.add_argument("--out-plot", help="PNG diagram figure")
    out.add_argument("--out-report", help="metrics report CSV, or JSON if the name ends in .json")
    out.add_argument("--compare", action="store_true", help="compare against the exact diagram")
    out.add_argument("--baseline", action="store_true", help="also evaluate the staircase baseline")
    b = p.add_argument_group("benchmark")
    b.add_argument("--benchmark", action="store_true", help="run the benchmark harness")
    b.add_argument("--bench-datasets", default="ramp,multi-bump,uniform-noise,bump-noise")
    b.add_argument("--bench-dims", type=_ints, default=(33, 33))
    b.add_argument("--bench-seeds", type=int, default=5, help="number of seeds starting at --seed")
    b.add_argument("--bench-epsilons", type=_floats, default=bench.EPSILONS)
    b.add_argument("--report-dir", default="benchmark-report")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.benchmark:
            seeds = range(args.seed, args.seed + args.bench_seeds)
            datasets = [d for d in args.bench_datasets.split(",") if d]
            rep = run_benchmark_report(
                datasets, args.bench_dims, seeds, args.bench_epsilons, args.threads, args.report_dir
            )
            sys.stdout.write(rep["table"])
            return 0
        config = RunConfig(
            input=args.input,
            header=args.header,
            synthetic=args.synthetic,
            dims=args.dims,
            seed=args.seed,
            epsilon_percent=args.epsilon,
            epsilon_abs=args.epsilon_abs,
            pairs=args.pairs,
            threads=args.threads,
            max_levels=args.max_levels,
            compare=args.compare,
            baseline=args.baseline,
            out_diagram=args.out_diagram,
            out_field=args.out_field,
            out_svg=args.out_svg,
            out_report=args.out_report,
            out_plot=args.out_plot,
        )
        art = run(config)
    except (OSError, ValueError, KeyError) as exc:
        print(f"topofold: error: {exc}", file=sys.stderr)
        return 2
    res = art.result
    print(
        f"pairs={len(res.diagram)} epsilon_abs={res.policy.epsilon_abs:.6g} "
        f"ti_percent={res.ti.ti_percent:.2f} needs_criticality={res.polarity.n_needs_criticality}"
    )
    if art.report:
        sys.stdout.write(bench.format_table(art.report, REPORT_COLUMNS))
    return 0


if __name__ == "__main__":
    sys.exit(main())
