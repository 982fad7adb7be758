import json
import math
import subprocess
import sys

import numpy as np
import pytest

from planar_elastica import io
from planar_elastica.cli import main
from planar_elastica.curves import elastic_energy, energy_length_product, length, total_curvature
from planar_elastica.shapes import ellipse_curve, regular_polygon


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_constants_text(capsys):
    code, out, _ = run_cli(capsys, "constants")
    assert code == 0
    line = [l for l in out.splitlines() if l.startswith("c_star")][0]
    assert "112.4396" in line


def test_constants_json_and_tolerance(capsys):
    code, out, _ = run_cli(capsys, "constants", "--json", "--tol", "1e-4")
    coarse = json.loads(out)
    assert code == 0 and set(coarse) == {"m_star", "e_star", "l_star", "c_star"}
    _, out, _ = run_cli(capsys, "constants", "--json", "--tol", "1e-12")
    assert abs(json.loads(out)["c_star"] - coarse["c_star"]) < 1e-3
    code, _, err = run_cli(capsys, "constants", "--tol", "-1")
    assert code == 1


def test_constants_solver_failure(capsys, monkeypatch):
    import planar_elastica.cli as cli
    from planar_elastica.elliptic import RootNotBracketedError

    def broken(tol):
        raise RootNotBracketedError("no sign change")

    monkeypatch.setattr(cli, "compute_constants", broken)
    code, _, err = run_cli(capsys, "constants")
    assert code == 2 and "numerical failure" in err


def test_curve_then_analyze_figure_eight(capsys, tmp_path):
    f = tmp_path / "f8.csv"
    svg = tmp_path / "f8.svg"
    code, _, _ = run_cli(capsys, "curve", "--kind", "figure-eight", "--n", 2000, "--out", f, "--svg", svg)
    assert code == 0
    lines = f.read_text().splitlines()
    assert lines[0] == "x,y" and len(lines) == 2001
    assert svg.read_text().startswith("<svg")
    code, out, _ = run_cli(capsys, "analyze", f, "--json")
    rep = json.loads(out)
    assert code == 0
    assert len(rep["intersections"]) == 1
    assert rep["intersections"][0]["multiplicity"] == 2
    assert rep["winding"] == 0
    assert rep["verdict"] == "ConsistentWithTheorem"
    assert {"length", "energy", "product", "total_curvature", "winding", "intersections", "verdict"} <= set(rep)


@pytest.mark.parametrize("kind", ["wavelike", "orbitlike", "borderline", "circular"])
def test_curve_kinds(capsys, tmp_path, kind):
    f = tmp_path / f"{kind}.csv"
    code, _, _ = run_cli(capsys, "curve", "--kind", kind, "--n", 300, "--m", 0.4, "--out", f)
    assert code == 0
    assert io.read_csv(f).n == 300


def test_analyze_convex_polygon(capsys, tmp_path):
    f = tmp_path / "poly.csv"
    io.write_csv(regular_polygon(7), f)
    code, out, _ = run_cli(capsys, "analyze", f, "--json")
    rep = json.loads(out)
    assert abs(rep["winding"]) == 1 and rep["intersections"] == []
    code, out, _ = run_cli(capsys, "analyze", f)
    assert "verdict" in out


def test_round_trip_is_lossless(capsys, tmp_path):
    c = ellipse_curve(1.7, 0.9, 333)
    f = tmp_path / "e.csv"
    io.write_csv(c, f)
    back = io.read_csv(f)
    assert np.array_equal(back.vertices, c.vertices)
    _, out, _ = run_cli(capsys, "analyze", f, "--json")
    rep = json.loads(out)
    assert rep["length"] == pytest.approx(length(c), abs=1e-12)
    assert rep["energy"] == pytest.approx(elastic_energy(c), abs=1e-12)
    assert rep["product"] == pytest.approx(energy_length_product(c), abs=1e-12)
    assert rep["total_curvature"] == pytest.approx(total_curvature(c), abs=1e-12)


def test_bad_input_files(capsys, tmp_path):
    assert run_cli(capsys, "analyze", tmp_path / "missing.csv")[0] == 1
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n1,2\nfoo,3\n0,0\n")
    assert run_cli(capsys, "analyze", bad)[0] == 1
    short = tmp_path / "short.csv"
    short.write_text("x,y\n0,0\n1,1\n")
    assert run_cli(capsys, "analyze", short)[0] == 1
    assert run_cli(capsys, "curve", "--kind", "circular", "--out", tmp_path / "no" / "dir.csv")[0] == 1
    assert run_cli(capsys, "curve", "--kind", "circular", "--n", 2, "--out", tmp_path / "c.csv")[0] == 1


def test_fenchel_sweep(capsys):
    code, out, _ = run_cli(capsys, "liyau-sweep", "--family", "fenchel", "--samples", 20, "--json")
    rep = json.loads(out)
    assert code == 0
    rows = rep["rows"]
    assert len(rows) == 20 and all(not r["embedded"] for r in rows)
    c_star = rep["summary"]["c_star"]
    assert all(r["product"] >= c_star - 0.5 for r in rows)
    tc = [r["total_curvature"] for r in rows]
    assert all(b < a for a, b in zip(tc, tc[1:]))
    assert tc[-1] - 2 * math.pi < 0.5


def test_perturbed_sweep(capsys):
    code, out, _ = run_cli(capsys, "liyau-sweep", "--family", "figure-eight-perturbed", "--samples", 100, "--seed", 42, "--json")
    s = json.loads(out)["summary"]
    assert code == 0
    assert s["c_star"] - 0.5 <= s["min_product_non_embedded"] <= s["c_star"] + 50
    assert s["violations"] == 0


def test_sweep_violation_exit_code(capsys, monkeypatch):
    import planar_elastica.cli as cli

    monkeypatch.setattr(cli, "liyau_check", _violating)
    code, out, _ = run_cli(capsys, "liyau-sweep", "--family", "lens", "--samples", 2, "--seed", 3)
    assert code == 2
    assert "Violation" in out


def _violating(c):
    from planar_elastica.curves import LiYauResult, Verdict

    return LiYauResult(product=1.0, embedded=False, verdict=Verdict.VIOLATION)


def test_sweep_deterministic(capsys):
    outs = []
    for threads in (1, 3, 0):
        _, out, _ = run_cli(capsys, "liyau-sweep", "--family", "figure-eight-perturbed", "--samples", 5, "--seed", 7, "--json", "--threads", threads)
        outs.append(out)
    assert outs[0] == outs[1] == outs[2]
    a = run_cli(capsys, "liyau-sweep", "--family", "lens", "--samples", 1, "--seed", 0)[1]
    b = run_cli(capsys, "liyau-sweep", "--family", "lens", "--samples", 1, "--seed", 0)[1]
    assert a == b
    assert run_cli(capsys, "liyau-sweep", "--family", "lens", "--samples", 0)[0] == 1


def test_flow_preserve(capsys, tmp_path):
    f = tmp_path / "ell.csv"
    c0 = ellipse_curve(1.25, 1.0, 40)
    io.write_csv(c0, f)
    out_dir = tmp_path / "run"
    code, out, _ = run_cli(
        capsys, "flow", "--in", f, "--mode", "preserve", "--steps", 60000, "--record", 20000, "--out-dir", out_dir, "--json"
    )
    assert code == 0
    trace = io.read_jsonl(out_dir / "trace.jsonl")
    steps = [r["step"] for r in trace]
    # records every 20000 steps plus a final one when sup |V| drops below the stop tolerance
    assert steps[:2] == [0, 20000] and steps[-1] <= 60000
    for key in ("step", "time", "energy", "length", "product", "lambda", "embedded", "circle_residual"):
        assert key in trace[0]
    assert trace[-1]["circle_residual"] < 1e-3 * length(c0)
    assert sorted(p.name for p in out_dir.glob("snap_*.csv")) == sorted(f"snap_{k}.csv" for k in steps)
    assert json.loads(out)["length_drift"] < 1e-3


def test_flow_penalized_and_errors(capsys, tmp_path):
    f = tmp_path / "ell.csv"
    io.write_csv(ellipse_curve(0.45, 0.4, 32), f)
    code, _, _ = run_cli(capsys, "flow", "--in", f, "--mode", "penalized", "--lambda", 2.0, "--steps", 1000, "--record", 500, "--out-dir", tmp_path / "p")
    assert code == 0
    assert len(io.read_jsonl(tmp_path / "p" / "trace.jsonl")) == 3
    assert run_cli(capsys, "flow", "--in", tmp_path / "nope.csv", "--mode", "preserve", "--out-dir", tmp_path / "q")[0] == 1
    assert run_cli(capsys, "flow", "--in", f, "--mode", "penalized", "--lambda", -1, "--out-dir", tmp_path / "q")[0] == 1


def test_flow_length_budget(capsys, tmp_path, monkeypatch):
    import planar_elastica.cli as cli

    monkeypatch.setattr(cli, "LENGTH_DRIFT_BUDGET", 0.0)
    f = tmp_path / "ell.csv"
    io.write_csv(ellipse_curve(1.3, 1.0, 32), f)
    code, _, err = run_cli(capsys, "flow", "--in", f, "--mode", "preserve", "--steps", 100, "--record", 100, "--out-dir", tmp_path / "r")
    assert code == 3


def test_console_script_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "planar_elastica.cli", "constants", "--json"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["m_star"] == pytest.approx(0.8261, abs=5e-5)
