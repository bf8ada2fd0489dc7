"""
Report assembly for sampled runs.
Provides summary dicts and pandas DataFrames for residuals, curvature and trajectories.
"""

import numpy as np
import pandas as pd

import settings


def to_jsonable(obj):
    """Recursively converts numpy values and complex numbers ([re, im]) for json.dump."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def verify_frame(records):
    """
    One row per sampled point
    Returns: DataFrame with coordinates, residuals and Nijenhuis norms
    """
    columns = ["point", "r1", "r2", "nijenhuis_closed", "nijenhuis_numeric"]
    if not records:
        return pd.DataFrame(columns=columns)
    rows = []
    for i, rec in enumerate(records):
        row = {"point": i}
        for j, v in enumerate(rec["x"]):
            row[f"x{j + 1}"] = v
        row.update({k: rec[k] for k in columns[1:]})
        rows.append(row)
    return pd.DataFrame(rows)


def residual_summary(df, tol):
    """
    Aggregates a verify frame
    Returns: dict with max residuals and the integrability verdict
    """
    if df.empty:
        return {"points": 0, "max_r1": 0.0, "max_r2": 0.0, "max_nijenhuis_closed": 0.0,
                "max_nijenhuis_numeric": 0.0, "verdict": "integrable within tolerance"}
    summary = {
        "points": int(len(df)),
        "max_r1": float(df["r1"].max()),
        "max_r2": float(df["r2"].max()),
        "max_nijenhuis_closed": float(df["nijenhuis_closed"].max()),
        "max_nijenhuis_numeric": float(df["nijenhuis_numeric"].max()),
    }
    integrable = max(summary["max_r1"], summary["max_r2"], summary["max_nijenhuis_closed"]) <= tol
    summary["verdict"] = "integrable within tolerance" if integrable else "non-integrable"
    return summary


def curvature_frame(records):
    """
    Flattens curvature reports
    Returns: DataFrame with point, plane_seed, K
    """
    rows = [{"point": i, "plane_seed": s["plane_seed"], "K": s["K"]}
            for i, rec in enumerate(records) for s in rec["sectional_samples"]]
    return pd.DataFrame(rows, columns=["point", "plane_seed", "K"])


def curvature_histogram(df, bins=settings.HISTOGRAM_BINS):
    """
    Histogram data of sectional curvature samples
    Returns: DataFrame with bin_left, bin_right, count
    """
    if df.empty:
        return pd.DataFrame(columns=["bin_left", "bin_right", "count"])
    lo, hi = float(df["K"].min()), float(df["K"].max())
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5e-12, hi + 0.5e-12
    counts, edges = np.histogram(df["K"].to_numpy(), bins=bins, range=(lo, hi))
    return pd.DataFrame({"bin_left": edges[:-1], "bin_right": edges[1:], "count": counts})


def curvature_summary(df, expected=None, tol=settings.DEFAULT_TOL):
    if df.empty:
        return {"samples": 0, "verdict": "no samples"}
    K = df["K"]
    summary = {
        "samples": int(len(df)),
        "min_K": float(K.min()),
        "max_K": float(K.max()),
        "mean_K": float(K.mean()),
        "nonpositive": bool(K.max() <= settings.NONPOSITIVE_TOL),
    }
    if expected is None:
        summary["verdict"] = "non-positive" if summary["nonpositive"] else "positive curvature found"
    else:
        deviation = float((K - expected).abs().max())
        summary["expected_K"] = float(expected)
        summary["max_deviation"] = deviation
        summary["verdict"] = "constant" if deviation <= tol else "not constant"
    return summary


def trajectory_frame(states, speeds, shot=0):
    """
    Trajectory rows for plotting
    Returns: DataFrame with t, base coordinates, k entries (re/im) and speed
    """
    rows = []
    for s, speed in zip(states, speeds):
        row = {"shot": shot, "t": s.t}
        for j, v in enumerate(s.p.x):
            row[f"x{j + 1}"] = v
        for (a, b), v in np.ndenumerate(s.p.k):
            row[f"k{a + 1}{b + 1}_re"] = v.real
            row[f"k{a + 1}{b + 1}_im"] = v.imag
        row["speed"] = speed
        rows.append(row)
    return pd.DataFrame(rows)


def trajectory_summary(shots, residual_tol=settings.GEODESIC_RESIDUAL_TOL,
                       drift_tol=settings.SPEED_DRIFT_TOL):
    completed = [s for s in shots if s["status"] == "ok"]
    max_res = max((s["geodesic_residual"] for s in completed), default=0.0)
    max_drift = max((s["speed_drift"] for s in completed), default=0.0)
    ok = len(completed) == len(shots) and max_res <= residual_tol and max_drift <= drift_tol
    return {
        "shots": len(shots),
        "completed": len(completed),
        "chart_exits": sum(1 for s in shots if s["status"] == "chart_exit"),
        "max_geodesic_residual": max_res,
        "max_speed_drift": max_drift,
        "verdict": "geodesic within tolerance" if ok else "failed",
    }
