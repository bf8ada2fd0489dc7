"""
Scenario generator
Writes example scenario files for every CLI command into scenarios/
"""

import json
import os

import numpy as np

import lie_kernel as lk
from curves import complex_to_json
from polynomial_fields import random_polynomial_field

OUTPUT_DIR = "scenarios"

# Built-in models and the sectional curvature they should report
MODELS = {
    "hyperbolic3": -1.0,
    "homog:su2": -2.0,
    "homog:so3": -1.0,
    "homog:t3": 0.0,
    "abelian:2": 0.0,
}

DIAGONAL_Z = [0.0, 0.0, -2.0 * np.pi * np.sqrt(2.0)]


def model_scenarios():
    """verify / curvature scenarios for each built-in model"""
    docs = {}
    for name, K in MODELS.items():
        slug = name.replace(":", "_")
        docs[f"verify_{slug}.json"] = {"model": name, "points": 32, "seed": 7}
        docs[f"curvature_{slug}.json"] = {"model": name, "points": 32, "planes": 8,
                                          "seed": 7, "expected_K": K}
    docs["verify_abelian_curved.json"] = {"model": "abelian:2", "strength": 0.5, "points": 16}
    return docs


def geodesic_scenarios():
    return {
        "geodesic_hyperbolic3.json": {
            "model": "hyperbolic3",
            "step": 1e-3,
            "shots": [
                {"x": [0.0, 0.0, 1.0], "v": [0.0, 0.0, 1.0], "t": 2.0},
                {"x": [0.0, 0.0, 1.0], "v": [1.0, 0.0, 0.0], "t": 2.0},
            ],
        },
    }


def random_chart_scenario(seed=0, degree=2):
    """Inline su(2) chart with random polynomial A and alpha near the identity frame"""
    rng = np.random.default_rng(seed)
    A = random_polynomial_field(rng, 3, 3, degree=degree, scale=0.2)
    alpha = random_polynomial_field(rng, 3, 3, degree=degree, scale=0.1, offset=np.eye(3))
    return {
        "chart": {
            "algebra": "su2",
            "domain": {"min": [-0.5, -0.5, -0.5], "max": [0.5, 0.5, 0.5]},
            "fields": {"A": A.to_json(), "alpha": alpha.to_json()},
        },
        "points": 16,
        "seed": seed,
    }


def curve_scenarios():
    diagonal = lk.exp_matrix(lk.su2(), np.array(DIAGONAL_Z) * 1j)
    torus_form = {"kind": "scalar", "algebra": "su2", "Z": complex_to_json(np.array(DIAGONAL_Z, dtype=complex)),
                  "zeta": [[1.0, 0.0]], "surface": {"type": "torus", "tau": [0.0, 1.0]}}
    isotropic = np.zeros((3, 3), dtype=complex)
    isotropic[:, 0] = [0.5, 1.0 - 0.5j, 0.25j]
    isotropic[:, 1] = 1j * isotropic[:, 0]
    return {
        "curve_torus_elliptic.json": {
            "curve": torus_form,
            "gamma": [complex_to_json(np.eye(2)), complex_to_json(diagonal)],
            "routes": [[[0, 0], [1, 0]], [[0, 0], [0, 1]]],
        },
        "curve_torus_rejected.json": {"curve": torus_form, "gamma": []},
        "curve_isotropic.json": {
            "curve": {"kind": "polynomial", "algebra": "su2", "coeffs": complex_to_json(isotropic)},
        },
    }


def write_all(output_dir=OUTPUT_DIR):
    os.makedirs(output_dir, exist_ok=True)
    docs = {}
    docs.update(model_scenarios())
    docs.update(geodesic_scenarios())
    docs.update(curve_scenarios())
    docs["verify_random_chart.json"] = random_chart_scenario()
    for name, doc in docs.items():
        with open(os.path.join(output_dir, name), "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
    return sorted(docs)


if __name__ == "__main__":
    print("Generating scenario files...")
    written = write_all()
    for name in written:
        print(f"  - {name}")
    print(f"\n{len(written)} scenarios written to {OUTPUT_DIR}/")
