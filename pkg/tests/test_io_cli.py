import csv
import json
import re
from pathlib import Path

import numpy as np
import pytest

from conftest import GOLDEN, fig7_diagram
from topofold import synthetic
from topofold.benchmark import run_benchmark, summarize
from topofold.cli import RunConfig, main, run, run_benchmark_report
from topofold.io import VolumeError, VolumeHeader, ingest, scalar_tag, write_volume
from topofold.pairing import PairType, PersistenceDiagram, PersistencePair
from topofold.pipeline import approximate
from topofold.render import render_svg

def write_raw(tmp_path, values, tag, name="vol.raw"):
    path = tmp_path / name
    path.write_bytes(np.asarray(values).tobytes())
    header = VolumeHeader(np.asarray(values).shape, tag)
    Path(str(path) + ".json").write_text(header.to_json())
    return path


def test_ingest_five_by_five_float32(tmp_path):
    vals = np.arange(25, dtype="<f4").reshape(5, 5)
    path = write_raw(tmp_path, vals, "f32")
    assert path.stat().st_size == 100
    state, h = ingest(path)
    assert h.depth == 2 and state.dims == (5, 5)
    assert np.array_equal(state.f, vals.reshape(-1))
    assert state.offsets.tolist() == list(range(25))


def test_ingest_size_mismatch(tmp_path):
    path = tmp_path / "vol.raw"
    path.write_bytes(b"\0" * 99)
    with pytest.raises(VolumeError, match="99 bytes"):
        ingest(path, VolumeHeader((5, 5), "f32"))


def test_ingest_unknown_type_tag(tmp_path):
    path = tmp_path / "vol.raw"
    path.write_bytes(b"\0" * 100)
    Path(str(path) + ".json").write_text(json.dumps({"dims": [5, 5], "type": "f16"}))
    with pytest.raises(VolumeError, match="f16"):
        ingest(path)


def test_ingest_rejects_nan_with_vertex_index(tmp_path):
    vals = np.zeros((5, 5), dtype="<f8")
    vals[2, 3] = np.nan
    path = write_raw(tmp_path, vals, "f64")
    with pytest.raises(VolumeError, match="vertex 13"):
        ingest(path)


@pytest.mark.parametrize("tag,dtype", [("u8", np.uint8), ("i16", np.int16), ("u32", np.uint32)])
def test_ingest_integer_types(tmp_path, tag, dtype):
    vals = np.random.default_rng(0).integers(0, 100, (9, 9)).astype(dtype)
    state, _ = ingest(write_raw(tmp_path, vals, tag))
    assert state.dtype == np.dtype(dtype)
    assert np.array_equal(state.f.reshape(9, 9), vals)


def test_write_volume_header(tmp_path):
    vals = np.random.default_rng(1).random((9, 5, 5)).astype(np.float32)
    header = write_volume(tmp_path / "out.raw", vals, name="demo")
    assert header.scalar_type == "f32" and header.dims == (9, 5, 5)
    doc = json.loads((tmp_path / "out.raw.json").read_text())
    assert doc == {"dims": [9, 5, 5], "type": "f32", "byteOrder": "little", "name": "demo"}


@pytest.mark.parametrize("dtype", [np.float32, np.float64, np.int32])
def test_exported_field_round_trip(tmp_path, dtype):
    f = synthetic.generate("bump-noise", (17, 17), 5)
    if np.dtype(dtype).kind == "i":
        f = np.round(f * 1000)
    f = f.astype(dtype)
    src = write_raw(tmp_path, f, scalar_tag(dtype))
    run(RunConfig(input=str(src), epsilon_percent=5, out_diagram=str(tmp_path / "a.csv"),
                  out_field=str(tmp_path / "fhat.raw")))
    run(RunConfig(input=str(tmp_path / "fhat.raw"), out_diagram=str(tmp_path / "b.csv")))
    a = PersistenceDiagram.from_csv((tmp_path / "a.csv").read_text())
    b = PersistenceDiagram.from_csv((tmp_path / "b.csv").read_text())
    # Re-ingested offsets restart from zero monotony, so compare values only.
    assert sorted((p.pair_type, p.birth, p.death) for p in a.pairs if p.persistence > 0) == sorted(
        (p.pair_type, p.birth, p.death) for p in b.pairs if p.persistence > 0
    )


def test_float_round_trip_reproduces_diagram_exactly(tmp_path):
    f = synthetic.generate("bump-noise", (33, 33), 1)
    src = write_raw(tmp_path, f, "f64")
    run(RunConfig(input=str(src), epsilon_percent=5, out_diagram=str(tmp_path / "a.csv"),
                  out_field=str(tmp_path / "fhat.raw")))
    run(RunConfig(input=str(tmp_path / "fhat.raw"), out_diagram=str(tmp_path / "b.csv")))
    a = PersistenceDiagram.from_csv((tmp_path / "a.csv").read_text())
    b = PersistenceDiagram.from_csv((tmp_path / "b.csv").read_text())
    assert a.value_multiset() == b.value_multiset()
    assert a.vertex_multiset() == b.vertex_multiset()


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(synthetic="ramp", epsilon_percent=120)
    with pytest.raises(ValueError):
        RunConfig(synthetic="ramp", threads=0)
    with pytest.raises(ValueError):
        RunConfig(synthetic="ramp", pairs="all")
    with pytest.raises(ValueError):
        RunConfig()


def read_report(path):
    with open(path) as fh:
        return {r["method"]: r for r in csv.DictReader(fh)}


def test_report_at_zero_epsilon_is_exact(tmp_path):
    rep = tmp_path / "report.csv"
    run(RunConfig(synthetic="bump-noise", dims=(17, 17), compare=True, out_report=str(rep)))
    row = read_report(rep)["ours"]
    assert float(row["w_inf"]) == 0.0 and float(row["w2"]) == 0.0


def test_report_respects_guarantee_and_has_baseline(tmp_path):
    rep = tmp_path / "report.csv"
    art = run(RunConfig(synthetic="bump-noise", dims=(33, 33), seed=3, epsilon_percent=5,
                        compare=True, baseline=True, out_report=str(rep)))
    rows = read_report(rep)
    assert set(rows) == {"ours", "staircase"}
    lo, hi = art.result.field.value_range
    assert float(rows["ours"]["w_inf"]) <= 0.05 * (hi - lo)
    assert art.report[0]["w_inf"] <= art.result.policy.epsilon_abs


def test_cli_end_to_end(tmp_path, capsys):
    vals = synthetic.generate("bump-noise", (17, 17), 0).astype("<f4")
    src = write_raw(tmp_path, vals, "f32")
    out = {k: tmp_path / f"out.{k}" for k in ("csv", "svg", "raw", "png", "json")}
    code = main([
        "--input", str(src), "--epsilon", "5", "--threads", "2",
        "--out-diagram", str(out["csv"]), "--out-svg", str(out["svg"]),
        "--out-field", str(out["raw"]), "--out-plot", str(out["png"]),
        "--out-report", str(out["json"]), "--compare", "--baseline",
    ])
    assert code == 0
    for p in out.values():
        assert p.stat().st_size > 0
    assert out["png"].read_bytes()[:4] == b"\x89PNG"
    assert [r["method"] for r in json.loads(out["json"].read_text())] == ["ours", "staircase"]
    assert "staircase" in capsys.readouterr().out


def test_cli_reports_errors(tmp_path, capsys):
    assert main(["--input", str(tmp_path / "missing.raw")]) != 0
    assert "error" in capsys.readouterr().err
    bad = tmp_path / "bad.raw"
    bad.write_bytes(b"\0" * 99)
    assert main(["--input", str(bad), "--header", str(write_header(tmp_path))]) != 0
    assert "99 bytes" in capsys.readouterr().err
    assert main(["--synthetic", "ramp", "--epsilon", "150"]) != 0


def write_header(tmp_path):
    p = tmp_path / "h.json"
    p.write_text(VolumeHeader((5, 5), "f32").to_json())
    return p


@pytest.mark.parametrize("name", ["uniform-noise", "bump-noise"])
def test_diagram_csv_identical_across_threads(tmp_path, name):
    texts = []
    for t in (1, 4, 8):
        path = tmp_path / f"d{t}.csv"
        run(RunConfig(synthetic=name, dims=(17, 17, 17), seed=2, epsilon_percent=5, threads=t,
                      out_diagram=str(path)))
        texts.append(path.read_bytes())
    assert texts[0] == texts[1] == texts[2]


def test_svg_without_epsilon_has_no_glyphs():
    d = approximate(synthetic.uniform_noise((9, 9), 0)).diagram
    svg = render_svg(d)
    assert "uncertainty-band" not in svg and "certainty-square" not in svg
    assert svg.count('class="pair pair-certain') == len(d)
    assert 'class="diagonal"' in svg


def test_svg_low_persistence_pair_sits_in_band():
    d = PersistenceDiagram(
        [PersistencePair(0, 1, 0.0, 10.0, PairType.GLOBAL, True),
         PersistencePair(2, 3, 4.0, 5.0, PairType.MIN_SADDLE, False)],
        epsilon_abs=1.0,
        field_range=(0.0, 10.0),
    )
    svg = render_svg(d)
    assert svg.count("uncertainty-band") == 1
    assert svg.count('class="certainty-square"') == 1
    assert svg.count("pair-uncertain") == 1


def test_fig7_analogue_has_one_glyph_in_band():
    d = fig7_diagram()
    svg = render_svg(d)
    assert svg.count("pair-uncertain") == 1
    assert svg.count('class="certainty-square"') == len(d) - 1


def test_svg_matches_golden_file(tmp_path):
    d = fig7_diagram()
    out = tmp_path / "fig7.svg"
    render_svg(d, out)
    assert out.read_bytes() == (GOLDEN / "fig7_analogue.svg").read_bytes()
    assert render_svg(d) == render_svg(d)


def test_svg_uses_fixed_precision():
    svg = render_svg(fig7_diagram())
    nums = re.findall(r'(?<![\w-])(?:x|y|x1|y1|x2|y2|cx|cy|width|height)="(-?[0-9.]+)"', svg)
    assert nums and all(re.fullmatch(r"-?\d+(\.\d{2})?", n) for n in nums)


def test_benchmark_rows_and_ramp_is_exact():
    rows = run_benchmark(["ramp", "bump-noise"], dims=(17, 17), seeds=range(3), epsilons=(0, 1, 5, 10))
    assert len(rows) == 2 * 3 * 4
    assert all(r["w_inf"] == 0.0 for r in rows if r["dataset"] == "ramp")
    summary = {(r["dataset"], r["epsilon"]): r for r in summarize(rows)}
    assert summary[("bump-noise", 5.0)]["ti_percent"] > summary[("bump-noise", 0.0)]["ti_percent"]
    assert summary[("bump-noise", 5.0)]["w2"] < summary[("bump-noise", 5.0)]["staircase_w2"]


def test_benchmark_report_files(tmp_path):
    src = write_raw(tmp_path, synthetic.multi_bump((9, 9), 0), "f64", name="bumps.raw")
    rep = run_benchmark_report(["uniform-noise", str(src)], (9, 9), range(2), (0, 5), 1, tmp_path / "rep")
    for name in ("benchmark.csv", "benchmark_summary.csv", "benchmark.txt", "benchmark.png"):
        assert (tmp_path / "rep" / name).stat().st_size > 0
    names = {r["dataset"] for r in rep["rows"]}
    assert names == {"uniform-noise", "bumps.raw"}
    assert "ti_percent" in rep["table"]
