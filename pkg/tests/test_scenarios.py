import json

import pytest

import generate_scenarios
import scenarios
from errors import ScenarioError


def test_normalize_maps_aliases():
    doc = scenarios.normalize({"Model_Name": "hyperbolic3", "n_points": 4, "random_seed": 2, "Expected_K": -1})
    assert doc == {"model": "hyperbolic3", "points": 4, "seed": 2, "expected_K": -1}


def test_normalize_rejects_unknown_keys():
    with pytest.raises(ScenarioError):
        scenarios.normalize({"model": "hyperbolic3", "colour": "blue"})
    with pytest.raises(ScenarioError):
        scenarios.normalize(["model"])


def test_build_scenario_defaults_and_overrides():
    sc = scenarios.build_scenario({"model": "homog:su2"}, "curvature", {"seed": 9, "points": None})
    assert sc.model == "homog:su2"
    assert sc.seed == 9
    assert sc.get("points") == 100
    assert sc.get("planes") == 8
    assert sc.get("missing", "fallback") == "fallback"


@pytest.mark.parametrize("doc,command", [
    ({"points": 4}, "verify"),
    ({"model": "hyperbolic3"}, "curve"),
    ({"model": "hyperbolic3", "points": 0}, "verify"),
    ({"model": "hyperbolic3", "step": -1.0}, "geodesic"),
    ({"model": "hyperbolic3", "seed": "x"}, "verify"),
])
def test_validation_failures(doc, command):
    ok, msg = scenarios.ScenarioManager("unused").load_dict(doc, command)
    assert not ok
    assert isinstance(msg, str)


def test_resolve_named_and_inline_charts():
    sc = scenarios.build_scenario({"model": "abelian:2", "strength": 0.5}, "verify")
    chart, model = scenarios.resolve_chart(sc)
    assert chart.name == "abelian:2"
    assert model is None
    inline = scenarios.build_scenario(generate_scenarios.random_chart_scenario(seed=3), "verify")
    chart, model = scenarios.resolve_chart(inline)
    assert chart.algebra.name == "su2"
    assert chart.name == "inline"


def test_inline_chart_needs_algebra():
    sc = scenarios.build_scenario({"chart": {"domain": {"min": [0], "max": [1]}}}, "verify")
    with pytest.raises(ScenarioError):
        scenarios.resolve_chart(sc)


def test_manager_loads_files(tmp_path):
    path = tmp_path / "verify.json"
    path.write_text(json.dumps({"model": "hyperbolic3", "points": 3}))
    mgr = scenarios.ScenarioManager(str(tmp_path))
    ok, sc = mgr.load_scenario("verify.json", "verify")
    assert ok
    assert sc.get("points") == 3
    assert mgr.last_load_time > 0
    ok, (chart, model) = mgr.chart()
    assert ok
    assert chart.name == "hyperbolic3"

    ok, msg = mgr.load_scenario("absent.json")
    assert not ok
    assert "not found" in msg

    (tmp_path / "broken.json").write_text("{model")
    ok, msg = mgr.load_scenario("broken.json")
    assert not ok
    assert "not valid JSON" in msg


def test_manager_chart_errors():
    mgr = scenarios.ScenarioManager("unused")
    assert mgr.chart() == (False, "no scenario loaded")
    ok, _ = mgr.load_dict({"model": "sphere"}, "verify")
    assert ok
    ok, msg = mgr.chart()
    assert not ok
    assert "unknown model" in msg


def test_generated_scenarios_are_loadable(tmp_path):
    written = generate_scenarios.write_all(str(tmp_path))
    assert "curve_torus_elliptic.json" in written
    mgr = scenarios.ScenarioManager(str(tmp_path))
    for name in written:
        command = name.split("_", 1)[0]
        ok, result = mgr.load_scenario(name, command)
        assert ok, result


def test_module_level_wrappers(monkeypatch):
    monkeypatch.setattr(scenarios, "manager", scenarios.ScenarioManager("unused"))
    assert scenarios.get_scenario() is None
    ok, sc = scenarios.load_dict({"model": "homog:so3"}, "curvature")
    assert ok
    assert scenarios.get_scenario() is sc
    ok, (chart, model) = scenarios.get_chart()
    assert ok
    assert chart.name == "homog:so3"
    assert model is not None
