"""
Induced geometry on the base: metric g_alpha, torsion, Riemann and sectional
curvature, and the curvature of the induced connection on ad(P).

Everything is read through alpha and the Lie algebra; Christoffel symbols of
g_alpha are never formed.
"""

import logging
from dataclasses import dataclass

import numpy as np

import lie_kernel as lk
import settings
from errors import PreconditionError
from gauge_field import (alpha_apply, alpha_inverse, covariant_exterior_d, curvature_F,
                         evaluate_form, fields_at, frame_condition, integrability_residuals)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MetricSample:
    x: np.ndarray
    g_matrix: np.ndarray


def induced_metric(chart, x):
    """g[mu, nu] = <alpha_mu(x), alpha_nu(x)>"""
    _, alpha = fields_at(chart, x)
    frame_condition(chart, x)
    g = alpha @ chart.algebra.inner_product @ alpha.T
    return MetricSample(np.asarray(x, dtype=float), (g + g.T) / 2)


def torsion(chart, x, u, v):
    _, alpha = fields_at(chart, x)
    return alpha_inverse(alpha, evaluate_form(covariant_exterior_d(chart, x), u, v))


def riemann_curvature(chart, x, u, v, w, tol=settings.INTEGRABILITY_TOL, force=False):
    """R(u, v)w = alpha^-1([[alpha(u), alpha(v)], alpha(w)]).

    Only valid where the integrability equations hold; raises
    PreconditionError otherwise unless force is set.
    """
    r1, r2 = integrability_residuals(chart, x)
    if max(r1, r2) > tol:
        if not force:
            raise PreconditionError(
                f"integrability residuals ({r1:.3g}, {r2:.3g}) exceed {tol:.1g}; curvature formula does not apply")
        logger.warning("riemann_curvature forced at residuals (%.3g, %.3g)", r1, r2)
    alg = chart.algebra
    _, alpha = fields_at(chart, x)
    a, b, c = alpha_apply(alpha, u), alpha_apply(alpha, v), alpha_apply(alpha, w)
    return alpha_inverse(alpha, lk.bracket(alg, lk.bracket(alg, a, b), c))


def orthonormalize(g, u, v):
    """Gram-Schmidt of (u, v) in the metric g, u first."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu = np.sqrt(u @ g @ u)
    if nu == 0.0:
        raise PreconditionError("zero vector does not span a plane")
    e1 = u / nu
    w = v - (e1 @ g @ v) * e1
    nw = np.sqrt(max(w @ g @ w, 0.0))
    if nw <= 1e-12 * np.sqrt(v @ g @ v):
        raise PreconditionError("u and v are parallel")
    return e1, w / nw


def sectional_curvature(chart, x, u, v):
    """K(u, v) = -|[alpha(u'), alpha(v')]|^2 for the g_alpha-orthonormalised pair."""
    alg = chart.algebra
    _, alpha = fields_at(chart, x)
    e1, e2 = orthonormalize(induced_metric(chart, x).g_matrix, u, v)
    B = lk.bracket(alg, alpha_apply(alpha, e1), alpha_apply(alpha, e2))
    return -float(lk.inner(alg, B, B))


def induced_curvature_operator(chart, x, u, v, s):
    """[F_A(u, v), s]"""
    F = curvature_F(chart, x)
    return lk.bracket(chart.algebra, evaluate_form(F, u, v), s)


def random_plane(rng, n):
    return rng.standard_normal(n), rng.standard_normal(n)


def curvature_report(chart, x, plane_seeds):
    """JSON-ready record of the metric, residuals and sectional samples at x."""
    g = induced_metric(chart, x).g_matrix
    r1, r2 = integrability_residuals(chart, x)
    samples = []
    for seed in plane_seeds:
        u, v = random_plane(np.random.default_rng(seed), chart.base_dim)
        samples.append({"plane_seed": int(seed), "K": sectional_curvature(chart, x, u, v)})
    return {
        "x": np.asarray(x, dtype=float).tolist(),
        "g_matrix": g.tolist(),
        "sectional_samples": samples,
        "residuals": [r1, r2],
    }
