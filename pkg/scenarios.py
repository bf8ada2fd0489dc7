"""
Scenario loading and validation for the command-line front end.
Loaders return (ok, scenario_or_message) so the CLI can report schema
problems without tracebacks.
"""

import json
import logging
import os
import time
from dataclasses import dataclass, field

import lie_kernel as lk
import models
import settings
from errors import GeometryError, ScenarioError
from gauge_field import chart_from_json

logger = logging.getLogger(__name__)

SCENARIO_DIR = "scenarios"

# Accepted spellings -> internal key
KEY_MAPPING = {
    "model": "model",
    "model_name": "model",
    "chart": "chart",
    "inline_chart": "chart",
    "seed": "seed",
    "random_seed": "seed",
    "points": "points",
    "n_points": "points",
    "num_points": "points",
    "step": "step",
    "h": "step",
    "dt": "step",
    "tol": "tol",
    "tolerance": "tol",
    "planes": "planes",
    "shots": "shots",
    "curve": "curve",
    "form": "curve",
    "eta": "curve",
    "gamma": "gamma",
    "stabilizer": "gamma",
    "periods": "periods",
    "routes": "routes",
    "samples": "samples",
    "z0": "z0",
    "f": "F",
    "strength": "strength",
    "output": "output",
    "command": "command",
    "expected_k": "expected_K",
    "t": "t",
    "time": "t",
}

DEFAULTS = {
    "seed": settings.DEFAULT_SEED,
    "points": settings.DEFAULT_POINTS,
    "step": settings.INTEGRATOR_STEP,
    "tol": settings.DEFAULT_TOL,
    "planes": settings.DEFAULT_PLANES,
}

# Keys each command cannot run without (one of the listed groups)
REQUIRED = {
    "verify": [("model",), ("chart",)],
    "curvature": [("model",), ("chart",)],
    "geodesic": [("model",), ("chart",)],
    "curve": [("curve",)],
}


@dataclass(frozen=True)
class Scenario:
    model: str = None
    chart_doc: dict = None
    params: dict = field(default_factory=dict)
    seed: int = settings.DEFAULT_SEED
    output: dict = field(default_factory=dict)

    def get(self, key, default=None):
        value = self.params.get(key)
        return default if value is None else value


def normalize(doc):
    """Renames known aliases to internal keys; unknown keys are a schema error."""
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object")
    out = {}
    for key, value in doc.items():
        mapped = KEY_MAPPING.get(str(key).strip().lower())
        if mapped is None:
            raise ScenarioError(f"unknown scenario key '{key}'")
        out[mapped] = value
    return out


def validate(doc, command=None):
    if command in REQUIRED and not any(all(k in doc for k in group) for group in REQUIRED[command]):
        needed = " or ".join("+".join(g) for g in REQUIRED[command])
        raise ScenarioError(f"'{command}' scenario needs {needed}")
    for key in ("points", "planes"):
        if key in doc and (not isinstance(doc[key], int) or doc[key] < 1):
            raise ScenarioError(f"'{key}' must be a positive integer")
    for key in ("step", "tol"):
        if key in doc and not (isinstance(doc[key], (int, float)) and doc[key] > 0):
            raise ScenarioError(f"'{key}' must be a positive number")
    if "seed" in doc and not isinstance(doc["seed"], int):
        raise ScenarioError("'seed' must be an integer")


def build_scenario(doc, command=None, overrides=None):
    doc = normalize(doc)
    for key, value in (overrides or {}).items():
        if value is not None:
            doc[key] = value
    validate(doc, command)
    params = dict(DEFAULTS)
    params.update({k: v for k, v in doc.items() if k not in ("model", "chart", "output")})
    return Scenario(model=doc.get("model"), chart_doc=doc.get("chart"), params=params,
                    seed=int(params["seed"]), output=doc.get("output") or {})


def resolve_algebra(spec):
    if spec is None:
        raise ScenarioError("inline chart needs an 'algebra'")
    if isinstance(spec, dict):
        return lk.algebra_from_json(spec)
    try:
        return lk.get_algebra(spec)
    except ValueError as e:
        raise ScenarioError(str(e))


def resolve_chart(scenario):
    """(chart, model wrapper or None) for a scenario's model name or inline chart."""
    if scenario.model:
        return models.build_model(scenario.model, F=scenario.get("F"), strength=scenario.get("strength"))
    doc = scenario.chart_doc
    if not isinstance(doc, dict):
        raise ScenarioError("scenario has neither a model name nor an inline chart")
    return chart_from_json(doc, resolve_algebra(doc.get("algebra"))), None


class ScenarioManager:
    def __init__(self, scenario_dir):
        self.scenario_dir = scenario_dir
        self.scenario = None
        self.last_load_time = 0

    def _resolve_path(self, path):
        if os.path.exists(path):
            return path
        candidate = os.path.join(self.scenario_dir, path)
        return candidate if os.path.exists(candidate) else None

    def load_scenario(self, path, command=None, overrides=None):
        """Reads and validates a scenario file.

        Returns:
            Tuple (success: bool, Scenario or error message)
        """
        resolved = self._resolve_path(path)
        if resolved is None:
            return False, f"scenario file '{path}' not found"
        try:
            with open(resolved, encoding="utf-8") as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as e:
            return False, f"scenario '{path}' is not valid JSON: {e}"
        except OSError as e:
            return False, f"cannot read scenario '{path}': {e}"
        return self.load_dict(doc, command, overrides)

    def load_dict(self, doc, command=None, overrides=None):
        try:
            self.scenario = build_scenario(doc, command, overrides)
        except ScenarioError as e:
            return False, str(e)
        self.last_load_time = time.time()
        logger.info("scenario loaded (model=%s)", self.scenario.model or "inline")
        return True, self.scenario

    def chart(self):
        """(success, (chart, model) or message) for the loaded scenario."""
        if self.scenario is None:
            return False, "no scenario loaded"
        try:
            return True, resolve_chart(self.scenario)
        except ScenarioError as e:
            return False, str(e)
        except GeometryError as e:
            return False, f"chart construction failed: {e}"


# Global instance
manager = ScenarioManager(SCENARIO_DIR)


def load_scenario(path, command=None, overrides=None):
    return manager.load_scenario(path, command, overrides)


def load_dict(doc, command=None, overrides=None):
    return manager.load_dict(doc, command, overrides)


def get_scenario():
    return manager.scenario


def get_chart():
    return manager.chart()
