import json

import numpy as np
import pytest

from fractalsync.cli import main
from fractalsync.serialize import (dumps_json, read_field_csv, sha256_of,
                                   write_field_csv)


def run(args):
    return main(args)


def test_json_floats_roundtrip(tmp_path):
    obj = {"a": 0.1 + 0.2, "b": [1 / 3, 2.0 ** -52], "c": {"d": 5 / 12}}
    text = dumps_json(obj)
    back = json.loads(text)
    assert back["a"] == obj["a"]
    assert back["b"] == obj["b"]
    assert back["c"]["d"] == obj["c"]["d"]
    assert "0.33333333333333331" in text  # 17 significant digits


def test_field_csv_roundtrip(tmp_path):
    vals = np.array([0.1, 1 / 3, -5 / 7, 2.0 ** -40])
    path = tmp_path / "f.csv"
    write_field_csv(path, vals)
    np.testing.assert_array_equal(read_field_csv(path), vals)


def test_build_graph_cmd(tmp_path):
    out = tmp_path / "g"
    assert run(["build-graph", "--fractal", "sg", "--level", "2",
                "--out", str(out)]) == 0
    data = json.loads((out / "graph_sg_2.json").read_text())
    assert data["level"] == 2
    assert len(data["vertices"]) == 15
    manifest = json.loads((out / "manifest.json").read_text())
    assert {e["path"] for e in manifest["artifacts"]} == {
        "graph_sg_2.json", "structure.json"}
    meta = json.loads((out / "structure.json").read_text())
    assert meta["weights"] == [0.6, 0.6, 0.6]


def test_harmonic_cmd_energy_one(tmp_path):
    out = tmp_path / "h"
    assert run(["harmonic", "--fractal", "sg", "--level", "4",
                "--boundary", "0,0,1", "--svg", "--out", str(out)]) == 0
    rep = json.loads((out / "energy.json").read_text())
    assert abs(rep["energy"] - 1.0) < 1e-12
    f = read_field_csv(out / "solution.csv")
    assert len(f) == 123
    assert (out / "solution.svg").exists()


def test_harmonic_cmd_zero_boundary(tmp_path):
    out = tmp_path / "h0"
    assert run(["harmonic", "--level", "3", "--boundary", "0,0,0",
                "--out", str(out)]) == 0
    assert np.abs(read_field_csv(out / "solution.csv")).max() == 0.0


def test_harmonic_cmd_ring_pin(tmp_path):
    out = tmp_path / "hr"
    assert run(["harmonic", "--fractal", "ring", "--level", "4",
                "--boundary", "0.25", "--out", str(out)]) == 0
    f = read_field_csv(out / "solution.csv")
    np.testing.assert_allclose(f, 0.25)


def test_covering_cmd(tmp_path):
    out = tmp_path / "c"
    assert run(["covering", "--level", "3", "--degree", "1",
                "--out", str(out)]) == 0
    lift = json.loads((out / "lift.json").read_text())
    assert abs(lift["energy"] - 5 / 12) < 1e-12
    neu = json.loads((out / "neumann.json").read_text())
    assert all(abs(v) < 1e-9 for v in neu.values())
    dom = json.loads((out / "domain.json").read_text())
    assert dom["cuts"][0]["jump"] == 1


def test_twist_cmd_and_determinism(tmp_path):
    out1, out2 = tmp_path / "t1", tmp_path / "t2"
    args = ["twist", "--level", "3", "--degree", "1", "--svg"]
    assert run(args + ["--out", str(out1)]) == 0
    assert run(args + ["--out", str(out2)]) == 0
    rep = json.loads((out1 / "equilibrium.json").read_text())
    assert rep["converged"] is True
    assert rep["stability"] == "stable"
    assert rep["degree"] == {"eps": 1}
    # identical config -> byte-identical artifacts
    for name in ("equilibrium.json", "equilibrium.csv", "equilibrium.svg"):
        assert sha256_of(out1 / name) == sha256_of(out2 / name)


def test_twist_zero_degree(tmp_path):
    out = tmp_path / "t0"
    assert run(["twist", "--level", "2", "--degree", "0",
                "--out", str(out)]) == 0
    rep = json.loads((out / "equilibrium.json").read_text())
    assert rep["energy"] == 0.0


def test_flow_cmd_with_trajectory(tmp_path):
    out = tmp_path / "f"
    assert run(["flow", "--fractal", "ring", "--level", "4",
                "--init", "twist:1", "--traj", "--out", str(out)]) == 0
    rep = json.loads((out / "equilibrium.json").read_text())
    assert rep["converged"] is True
    assert rep["degree"] == {"eps": 1}
    lines = (out / "trajectory.csv").read_text().strip().splitlines()
    assert lines[0] == "time,energy,residual"


def test_flow_cmd_from_csv(tmp_path):
    out = tmp_path / "fc"
    init = tmp_path / "init.csv"
    write_field_csv(init, np.full(8, 0.625))
    assert run(["flow", "--fractal", "ring", "--level", "3",
                "--init", str(init), "--out", str(out)]) == 0
    rep = json.loads((out / "equilibrium.json").read_text())
    assert rep["energy"] == 0.0


def test_verify_cmd_ring_closed_form(tmp_path):
    out = tmp_path / "v"
    assert run(["verify", "--fractal", "ring", "--degree", "1",
                "--levels", "3:6", "--out", str(out)]) == 0
    table = json.loads((out / "verify.json").read_text())
    for row in table["rows"]:
        n = row["level"]
        closed = 0.5 - 2.0 ** (2 * n) * (1 - np.cos(2 * np.pi * 2.0 ** -n)) / (4 * np.pi ** 2)
        assert abs(row["gap"] - closed) < 1e-12
    assert table["gap_decay_exponent"] == pytest.approx(-2 * np.log(2), rel=0.05)


def test_verify_cmd_zero_degree_gaps_zero(tmp_path):
    out = tmp_path / "v0"
    assert run(["verify", "--degree", "0", "--levels", "2:3",
                "--out", str(out)]) == 0
    table = json.loads((out / "verify.json").read_text())
    assert all(row["gap"] == 0.0 for row in table["rows"])


def test_sweep_cmd(tmp_path):
    out = tmp_path / "s"
    assert run(["sweep", "--levels", "2:3", "--degrees", "1",
                "--seeds", "0:1", "--perturb", "0.02",
                "--out", str(out)]) == 0
    table = json.loads((out / "sweep.json").read_text())
    assert len(table["jobs"]) == 4
    assert all(job["converged"] for job in table["jobs"])
    assert all(job["degree_found"] == {"eps": 1} for job in table["jobs"])


def test_cli_error_single_line(tmp_path, capsys):
    assert run(["harmonic", "--level", "3", "--boundary", "bogus",
                "--out", str(tmp_path / "e")]) == 1
    err = capsys.readouterr().err.strip()
    assert err.startswith("error: ")
    assert "\n" not in err


def test_cli_config_file(tmp_path):
    cfgfile = tmp_path / "run.json"
    cfgfile.write_text(json.dumps({
        "fractal": "sg", "level": 3, "degree": "1", "out": str(tmp_path / "o")}))
    assert run(["twist", "--config", str(cfgfile)]) == 0
    rep = json.loads((tmp_path / "o" / "equilibrium.json").read_text())
    assert rep["degree"] == {"eps": 1}


def test_cli_unresolved_winding_errors(tmp_path):
    # level too coarse for the requested degree: actionable failure
    assert run(["covering", "--level", "1", "--degree", "0,1,0,0",
                "--out", str(tmp_path / "uw")]) == 1


def test_verify_cmd_sg_gap_matches_library(tmp_path):
    out = tmp_path / "vsg"
    assert run(["verify", "--degree", "1", "--levels", "2:4",
                "--out", str(out)]) == 0
    import fractalsync as fs
    from fractalsync import km_energy
    table = json.loads((out / "verify.json").read_text())
    for row in table["rows"]:
        g = fs.build_sg_graph(row["level"])
        phases, lift = fs.circle_harmonic_map(g, fs.DegreeVector({(): 1}))
        gap = lift.energy() - km_energy(g, phases).energy
        assert abs(row["gap"] - gap) < 1e-14
    # fitted exponent reported and consistent with the rows
    gaps = [row["gap"] for row in table["rows"]]
    ns = [row["level"] for row in table["rows"]]
    slope = float(np.polyfit(ns, np.log(gaps), 1)[0])
    assert table["gap_decay_exponent"] == pytest.approx(slope, rel=1e-12)


def test_sweep_parallel_matches_serial(tmp_path):
    args = ["sweep", "--levels", "2:2", "--degrees", "1;2", "--seeds", "0:1",
            "--perturb", "0.01"]
    out1, out2 = tmp_path / "s1", tmp_path / "s2"
    assert run(args + ["--jobs", "1", "--out", str(out1)]) == 0
    assert run(args + ["--jobs", "2", "--out", str(out2)]) == 0
    assert (out1 / "sweep.json").read_bytes() == (out2 / "sweep.json").read_bytes()
