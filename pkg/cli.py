"""
Command-line front end.

    python cli.py verify|curvature|geodesic|curve --scenario FILE --out DIR
        [--seed N] [--points N] [--step H] [--tol T]

Exit codes: 0 pass, 1 verdict failed, 2 usage/schema error, 3 numeric failure.
The log level is read from CXBUNDLE_LOG_LEVEL.
"""

import argparse
import json
import logging
import os
import sys

import numpy as np
import pandas as pd

import base_geometry
import curves
import dynamics
import gauge_field
import lie_kernel as lk
import reports
import scenarios
import settings
from errors import ChartExitError, GeometryError, PreconditionError, ScenarioError

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

COMMANDS = ("verify", "curvature", "geodesic", "curve")


def configure_logging():
    level = os.environ.get(settings.LOG_LEVEL_ENV, "WARNING").upper()
    if not isinstance(logging.getLevelName(level), int):
        level = "WARNING"
    logging.basicConfig(level=level, format=settings.LOG_FORMAT)


def write_json(out_dir, name, payload):
    path = os.path.join(out_dir, name)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(reports.to_jsonable(payload), fh, sort_keys=True, indent=2)
        fh.write("\n")
    return path


def write_csv(out_dir, name, df):
    path = os.path.join(out_dir, name)
    df.to_csv(path, index=False, float_format="%.12g")
    return path


def _unit(alg, X):
    return X / lk.norm(alg, X)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_verify(scenario, out_dir):
    """Integrability residuals and both Nijenhuis evaluations over sampled points."""
    chart, _ = scenarios.resolve_chart(scenario)
    alg = chart.algebra
    rng = np.random.default_rng(scenario.seed)
    points = gauge_field.sample_points(chart, scenario.get("points"), scenario.seed, margin=0.05)
    h = scenario.get("step", settings.NIJENHUIS_STEP)
    records = []
    for x in points:
        r1, r2 = gauge_field.integrability_residuals(chart, x)
        p = gauge_field.BundlePoint(x, lk.random_compact(alg, rng))
        X, Y = (_unit(alg, lk.random_element(alg, rng)) for _ in range(2))
        closed = gauge_field.nijenhuis_closed_form(chart, p, X, Y).norm()
        numeric = gauge_field.nijenhuis_numeric(chart, p, X, Y, h).norm()
        records.append({"x": x, "r1": r1, "r2": r2,
                        "nijenhuis_closed": closed, "nijenhuis_numeric": numeric})
    df = reports.verify_frame(records)
    summary = reports.residual_summary(df, scenario.get("tol"))
    summary["model"] = chart.name
    write_csv(out_dir, "verify_points.csv", df)
    write_json(out_dir, "verify_report.json", summary)
    logger.info("verify %s: %s", chart.name, summary["verdict"])
    return summary, EXIT_OK if summary["verdict"] == "integrable within tolerance" else EXIT_VERDICT


def cmd_curvature(scenario, out_dir):
    """Sectional curvature samples, histogram data and summary."""
    chart, _ = scenarios.resolve_chart(scenario)
    points = gauge_field.sample_points(chart, scenario.get("points"), scenario.seed, margin=0.05)
    planes = scenario.get("planes")
    records = []
    for i, x in enumerate(points):
        seeds = [scenario.seed * 100003 + i * planes + j for j in range(planes)]
        records.append(base_geometry.curvature_report(chart, x, seeds))
    df = reports.curvature_frame(records)
    summary = reports.curvature_summary(df, scenario.get("expected_K"), scenario.get("tol"))
    summary["model"] = chart.name
    write_csv(out_dir, "curvature_samples.csv", df)
    write_csv(out_dir, "curvature_histogram.csv", reports.curvature_histogram(df))
    write_json(out_dir, "curvature_report.json", {"summary": summary, "records": records})
    ok = summary["verdict"] in ("non-positive", "constant")
    return summary, EXIT_OK if ok else EXIT_VERDICT


def _default_shots(chart, scenario):
    rng = np.random.default_rng(scenario.seed)
    points = gauge_field.sample_points(chart, scenario.get("points"), scenario.seed, margin=0.4)
    shots = []
    for x in points:
        v = rng.standard_normal(chart.base_dim)
        g = base_geometry.induced_metric(chart, x).g_matrix
        shots.append({"x": x.tolist(), "v": (v / np.sqrt(v @ g @ v)).tolist(),
                      "t": float(scenario.get("t", 0.5))})
    return shots


def cmd_geodesic(scenario, out_dir):
    """Geodesic shots by horizontal J-flow; trajectories to CSV, residual summary to JSON."""
    chart, _ = scenarios.resolve_chart(scenario)
    cfg = dynamics.IntegratorConfig(step=scenario.get("step"))
    shots = scenario.get("shots") or _default_shots(chart, scenario)
    for shot in shots:
        if not np.any(np.asarray(shot.get("v", []), dtype=float)):
            raise ScenarioError("geodesic shot needs a non-zero initial velocity 'v'")
    frames, results = [], []
    for i, shot in enumerate(shots):
        x, v, t = np.asarray(shot["x"], dtype=float), np.asarray(shot["v"], dtype=float), float(shot.get("t", 1.0))
        result = {"x0": x, "v": v, "t": t}
        try:
            X, states = dynamics.geodesic_trajectory(chart, x, v, t, cfg)
        except ChartExitError as e:
            result.update(status="chart_exit", exit_time=e.exit_time)
            results.append(result)
            continue
        speeds = dynamics.speed_profile(chart, states, X)
        result.update(status="ok", end=states[-1].p.x,
                      geodesic_residual=dynamics.geodesic_residual(chart, states),
                      speed_drift=float(np.abs(speeds - speeds[0]).max()))
        results.append(result)
        frames.append(reports.trajectory_frame(states, speeds, shot=i))
    summary = reports.trajectory_summary(results)
    summary["model"] = chart.name
    if frames:
        write_csv(out_dir, "geodesic_trajectories.csv", pd.concat(frames, ignore_index=True))
    write_json(out_dir, "geodesic_report.json", {"summary": summary, "shots": results})
    return summary, EXIT_OK if summary["verdict"] == "geodesic within tolerance" else EXIT_VERDICT


def _periods_for(eta, scenario):
    if scenario.get("periods") is not None:
        return curves.PeriodData(tuple(curves.parse_complex(w) for w in scenario.get("periods")))
    surface = eta.surface
    if surface.get("type") == "torus" and eta.kind == "scalar":
        if np.any(eta.zeta[1:]):
            raise ScenarioError("on the torus zeta must be a constant multiple of dz")
        return curves.torus_periods(eta.zeta[0], curves.parse_complex(surface.get("tau", [0.0, 1.0])))
    return curves.PeriodData(())


def cmd_curve(scenario, out_dir):
    """Development, lattice condition, factorisation and quadric checks for a curve form."""
    eta = curves.CurveForm.from_json(scenario.get("curve"))
    alg = eta.algebra
    cfg = dynamics.IntegratorConfig(step=scenario.get("step"))
    samples = [curves.parse_complex(z) for z in scenario.get("samples", [[0.1, 0.2], [0.3, -0.1], [-0.2, 0.25]])]
    report = {"kind": eta.kind, "algebra": alg.name}

    quadric = curves.quadric_residual(eta)
    report["quadric"] = {"coefficients": quadric,
                         "zero": bool(np.abs(quadric).max(initial=0.0) <= 1e-14)}
    report["conformality"] = {
        "max_residual": max(curves.conformality_residual(eta, z) for z in samples),
        "max_defect": max(curves.conformal_defect(eta, z) for z in samples),
    }
    report["type10_residual"] = max(curves.type10_check(eta.sampler(), z) for z in samples)
    z0 = curves.parse_complex(scenario.get("z0", [0.0, 0.0]))
    if np.abs(eta.polynomial()).max() > 0:
        report["projective_z0"] = curves.projectivize(eta, z0)

    exit_code = EXIT_OK
    if eta.kind == "scalar":
        gamma = curves.StabilizerGroup.from_json(scenario.get("gamma"), alg)
        periods = _periods_for(eta, scenario)
        lattice = curves.lattice_condition(eta.Z, periods, gamma, alg)
        report["lattice"] = {"status": lattice.status, "witnesses": list(lattice.witnesses),
                             "failing_period": lattice.failing_period}
        factor = curves.scalar_factorization(eta.Z, periods, gamma, alg)
        report["factorization"] = factor
        routes = []
        for path in scenario.get("routes", []):
            path = [curves.parse_complex(z) for z in path]
            numeric = curves.develop(None, None, eta, path, cfg)
            closed = curves.develop_scalar(eta, path)
            routes.append({"path": path, "develop_error": float(np.abs(numeric - closed).max())})
        report["routes"] = routes
        report["verdict"] = factor["kind"]
        if factor["kind"] in ("rejected", "undecided"):
            exit_code = EXIT_VERDICT
    else:
        report["verdict"] = "quadric" if report["quadric"]["zero"] else "not in quadric"
    write_json(out_dir, "curve_report.json", report)
    return report, exit_code


HANDLERS = {
    "verify": cmd_verify,
    "curvature": cmd_curvature,
    "geodesic": cmd_geodesic,
    "curve": cmd_curve,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="cxbundle",
                                     description="Almost complex structures on principal bundles")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=HANDLERS[name].__doc__)
        p.add_argument("--scenario", required=True, help="scenario JSON file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--points", type=int, default=None)
        p.add_argument("--step", type=float, default=None)
        p.add_argument("--tol", type=float, default=None)
    return parser


def main(argv=None):
    configure_logging()
    args = build_parser().parse_args(argv)
    overrides = {"seed": args.seed, "points": args.points, "step": args.step, "tol": args.tol}
    ok, result = scenarios.load_scenario(args.scenario, args.command, overrides)
    if not ok:
        print(f"error: {result}", file=sys.stderr)
        return EXIT_USAGE
    try:
        os.makedirs(args.out, exist_ok=True)
        summary, code = HANDLERS[args.command](result, args.out)
    except (ScenarioError, PreconditionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (GeometryError, np.linalg.LinAlgError) as e:
        logger.error("%s failed: %s", args.command, e)
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"{args.command}: {summary.get('verdict', 'done')}")
    return code


if __name__ == "__main__":
    sys.exit(main())
