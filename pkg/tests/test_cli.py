import json

import numpy as np
import pandas as pd
import pytest

import cli
import generate_scenarios


def _scenario(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def _run(command, scenario, out, *extra):
    return cli.main([command, "--scenario", scenario, "--out", str(out), *extra])


def test_verify_hyperbolic(tmp_path, capsys):
    scenario = _scenario(tmp_path, "v.json", {"model": "hyperbolic3", "points": 4, "seed": 1})
    assert _run("verify", scenario, tmp_path / "out") == cli.EXIT_OK
    report = json.loads((tmp_path / "out" / "verify_report.json").read_text())
    assert report["verdict"] == "integrable within tolerance"
    assert report["points"] == 4
    assert report["max_nijenhuis_numeric"] < 1e-5
    df = pd.read_csv(tmp_path / "out" / "verify_points.csv")
    assert len(df) == 4
    assert "verify: integrable within tolerance" in capsys.readouterr().out


def test_verify_is_deterministic(tmp_path):
    scenario = _scenario(tmp_path, "v.json", generate_scenarios.random_chart_scenario(seed=2))
    codes = [_run("verify", scenario, tmp_path / d, "--points", "3") for d in ("a", "b")]
    assert codes == [cli.EXIT_VERDICT, cli.EXIT_VERDICT]
    for name in ("verify_report.json", "verify_points.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    report = json.loads((tmp_path / "a" / "verify_report.json").read_text())
    assert report["verdict"] == "non-integrable"


def test_verify_honours_the_step_override(tmp_path):
    scenario = _scenario(tmp_path, "v.json", generate_scenarios.random_chart_scenario(seed=2))
    _run("verify", scenario, tmp_path / "a", "--points", "3")
    _run("verify", scenario, tmp_path / "b", "--points", "3", "--step", "5e-4")
    a = pd.read_csv(tmp_path / "a" / "verify_points.csv")
    b = pd.read_csv(tmp_path / "b" / "verify_points.csv")
    pd.testing.assert_series_equal(a["nijenhuis_closed"], b["nijenhuis_closed"])
    assert (a["nijenhuis_numeric"] != b["nijenhuis_numeric"]).any()
    np.testing.assert_allclose(a["nijenhuis_numeric"], a["nijenhuis_closed"], rtol=1e-3)
    np.testing.assert_allclose(b["nijenhuis_numeric"], b["nijenhuis_closed"], rtol=1e-3)


def test_curvature_homogeneous(tmp_path):
    scenario = _scenario(tmp_path, "c.json", {"model": "homog:su2", "points": 4, "planes": 2, "expected_K": -2.0})
    assert _run("curvature", scenario, tmp_path) == cli.EXIT_OK
    report = json.loads((tmp_path / "curvature_report.json").read_text())
    assert report["summary"]["verdict"] == "constant"
    assert report["summary"]["samples"] == 8
    assert len(pd.read_csv(tmp_path / "curvature_samples.csv")) == 8
    assert pd.read_csv(tmp_path / "curvature_histogram.csv")["count"].sum() == 8


def test_geodesic_shots(tmp_path):
    doc = {"model": "hyperbolic3", "step": 1e-3,
           "shots": [{"x": [0, 0, 1], "v": [0, 0, 1], "t": 1.0}, {"x": [0, 0, 1], "v": [1, 0, 0], "t": 1.0}]}
    assert _run("geodesic", _scenario(tmp_path, "g.json", doc), tmp_path) == cli.EXIT_OK
    report = json.loads((tmp_path / "geodesic_report.json").read_text())
    assert report["summary"]["completed"] == 2
    assert report["shots"][0]["end"][2] == pytest.approx(2.718281828459045, rel=1e-9)
    traj = pd.read_csv(tmp_path / "geodesic_trajectories.csv")
    assert set(traj["shot"]) == {0, 1}


def test_geodesic_chart_exit_fails_the_verdict(tmp_path):
    doc = {"model": "hyperbolic3", "shots": [{"x": [0, 0, 1], "v": [0, 0, -1], "t": 3.0}]}
    assert _run("geodesic", _scenario(tmp_path, "g.json", doc), tmp_path) == cli.EXIT_VERDICT
    report = json.loads((tmp_path / "geodesic_report.json").read_text())
    assert report["shots"][0]["status"] == "chart_exit"


def test_geodesic_zero_velocity_is_a_usage_error(tmp_path):
    doc = {"model": "hyperbolic3", "shots": [{"x": [0, 0, 1], "v": [0, 0, 0]}]}
    assert _run("geodesic", _scenario(tmp_path, "g.json", doc), tmp_path) == cli.EXIT_USAGE


def test_curve_scenarios(tmp_path):
    generate_scenarios.write_all(str(tmp_path))
    assert _run("curve", str(tmp_path / "curve_torus_elliptic.json"), tmp_path / "e") == cli.EXIT_OK
    report = json.loads((tmp_path / "e" / "curve_report.json").read_text())
    assert report["verdict"] == "elliptic"
    assert report["lattice"]["status"] == "true"
    assert report["factorization"]["tau"] == pytest.approx([0.0, 1.0])
    assert max(r["develop_error"] for r in report["routes"]) < 1e-6

    assert _run("curve", str(tmp_path / "curve_torus_rejected.json"), tmp_path / "r") == cli.EXIT_VERDICT
    report = json.loads((tmp_path / "r" / "curve_report.json").read_text())
    assert report["lattice"]["failing_period"] == [0.0, 1.0]

    assert _run("curve", str(tmp_path / "curve_isotropic.json"), tmp_path / "q") == cli.EXIT_OK
    report = json.loads((tmp_path / "q" / "curve_report.json").read_text())
    assert report["verdict"] == "quadric"
    assert report["conformality"]["max_residual"] < 1e-12


def test_usage_errors(tmp_path, capsys):
    assert _run("verify", str(tmp_path / "missing.json"), tmp_path) == cli.EXIT_USAGE
    bad = _scenario(tmp_path, "bad.json", {"model": "hyperbolic3", "speed": 3})
    assert _run("verify", bad, tmp_path) == cli.EXIT_USAGE
    assert "unknown scenario key" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        cli.main(["integrate"])


def test_numeric_failure_exit_code(tmp_path):
    doc = {"chart": {"algebra": "su2", "domain": {"min": [-1, -1, -1], "max": [1, 1, 1]},
                     "fields": {"alpha": {"terms": [{"powers": [0, 0, 0], "coeffs": [[1, 0, 0], [0, 1, 0], [0, 0, 0]]}]}}},
           "points": 2}
    assert _run("verify", _scenario(tmp_path, "s.json", doc), tmp_path) == cli.EXIT_NUMERIC
