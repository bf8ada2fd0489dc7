"""
Local-trivialisation representation of (P, A, alpha) over a chart U x K.

Conventions used throughout:
  - A(x), alpha(x) are (n, d) arrays; row mu is the algebra element A_mu(x).
  - A point is p = (x, k). A TangentVector (h, X) has coordinates
    xdot = h, kdot = -A(h) k + k X, so omega_A(v) = X.
  - alpha_p(v) = Ad_{k^-1} alpha(x)(h), which vanishes on vertical vectors.
  - Derivative arrays are indexed D[mu, nu] = d_mu field_nu.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
import scipy.linalg
from scipy.stats import qmc

import lie_kernel as lk
import settings
from errors import DimensionMismatchError, DomainError, ScenarioError, SingularFrameError
from polynomial_fields import PolynomialField

logger = logging.getLogger(__name__)

DERIV_MODES = ("analytic", "numeric")


@dataclass(frozen=True, eq=False)
class GaugeChart:
    algebra: lk.LieAlgebra
    domain_min: np.ndarray
    domain_max: np.ndarray
    A_field: Callable
    alpha_field: Callable
    dA_field: Optional[Callable] = None
    dalpha_field: Optional[Callable] = None
    deriv_mode: str = "analytic"
    step: float = settings.DERIV_STEP
    richardson: bool = False
    name: str = "chart"

    def __post_init__(self):
        lo = np.asarray(self.domain_min, dtype=float)
        hi = np.asarray(self.domain_max, dtype=float)
        if lo.shape != (self.algebra.dim,) or hi.shape != lo.shape:
            raise DimensionMismatchError(
                f"chart box must live in R^{self.algebra.dim} (base dimension = dim k)")
        if (lo >= hi).any():
            raise ValueError("chart box has empty interior")
        if self.deriv_mode not in DERIV_MODES:
            raise ValueError(f"deriv_mode must be one of {DERIV_MODES}")
        if self.deriv_mode == "analytic" and (self.dA_field is None or self.dalpha_field is None):
            raise ValueError("analytic deriv_mode needs dA_field and dalpha_field")
        object.__setattr__(self, "domain_min", lo)
        object.__setattr__(self, "domain_max", hi)

    @property
    def base_dim(self):
        return self.algebra.dim

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.domain_min) and np.all(x <= self.domain_max))


@dataclass(frozen=True, eq=False)
class BundlePoint:
    x: np.ndarray
    k: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "k", np.asarray(self.k, dtype=complex))

    def distance(self, other):
        return float(max(np.abs(self.x - other.x).max(), np.abs(self.k - other.k).max()))


@dataclass(frozen=True, eq=False)
class TangentVector:
    horizontal: np.ndarray
    vertical: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "horizontal", np.asarray(self.horizontal, dtype=float))
        object.__setattr__(self, "vertical", np.asarray(self.vertical, dtype=float))

    def __add__(self, other):
        return TangentVector(self.horizontal + other.horizontal, self.vertical + other.vertical)

    def __sub__(self, other):
        return TangentVector(self.horizontal - other.horizontal, self.vertical - other.vertical)

    def __neg__(self):
        return TangentVector(-self.horizontal, -self.vertical)

    def scale(self, s):
        return TangentVector(s * self.horizontal, s * self.vertical)

    def as_array(self):
        return np.concatenate([self.horizontal, self.vertical])

    def norm(self):
        return float(np.linalg.norm(self.as_array()))


def vertical_vector(chart, X):
    return TangentVector(np.zeros(chart.base_dim), X)


def horizontal_vector(chart, h):
    return TangentVector(h, np.zeros(chart.algebra.dim))


# ---------------------------------------------------------------------------
# Chart construction
# ---------------------------------------------------------------------------

def chart_from_polynomials(algebra, domain_min, domain_max, A_poly, alpha_poly,
                           name="polynomial", deriv_mode="analytic", step=settings.DERIV_STEP):
    n = algebra.dim
    for label, poly in (("A", A_poly), ("alpha", alpha_poly)):
        if poly.n_vars != n or tuple(poly.shape) != (n, n):
            raise DimensionMismatchError(f"{label} polynomial must map R^{n} to ({n}, {n}) arrays")
    analytic = deriv_mode == "analytic"
    return GaugeChart(
        algebra=algebra,
        domain_min=domain_min,
        domain_max=domain_max,
        A_field=A_poly.evaluate,
        alpha_field=alpha_poly.evaluate,
        dA_field=A_poly.derivative if analytic else None,
        dalpha_field=alpha_poly.derivative if analytic else None,
        deriv_mode=deriv_mode,
        step=step,
        name=name,
    )


def chart_from_json(doc, algebra):
    """Polynomial chart from {"domain": {"min", "max"}, "fields": {"A": ..., "alpha": ...}}."""
    try:
        domain = doc["domain"]
        fields = doc["fields"]
        lo, hi = domain["min"], domain["max"]
    except (KeyError, TypeError) as e:
        raise ScenarioError(f"inline chart is missing {e}")
    n = algebra.dim
    A_poly = PolynomialField.from_json(fields.get("A", {"terms": []}), n, (n, n))
    alpha_poly = PolynomialField.from_json(fields["alpha"], n, (n, n))
    return chart_from_polynomials(algebra, lo, hi, A_poly, alpha_poly,
                                  name=doc.get("name", "inline"),
                                  deriv_mode=doc.get("deriv_mode", "analytic"),
                                  step=float(doc.get("step", settings.DERIV_STEP)))


def ad_matrix_of_group(algebra, g):
    """Matrix M with Ad_g X = M @ X on coefficient vectors."""
    return np.column_stack([lk.ad_action(algebra, g, algebra.basis(j), check=False)
                            for j in range(algebra.dim)])


def conjugate_chart(chart, g):
    """Constant gauge transformation A -> Ad_g A, alpha -> Ad_g alpha."""
    lk.check_compact(chart.algebra, g)
    M = ad_matrix_of_group(chart.algebra, g)

    def wrap(f):
        return None if f is None else (lambda x: f(x) @ M.T)

    return replace(chart,
                   A_field=wrap(chart.A_field),
                   alpha_field=wrap(chart.alpha_field),
                   dA_field=wrap(chart.dA_field),
                   dalpha_field=wrap(chart.dalpha_field),
                   name=f"{chart.name}|conj")


def sample_points(chart, count, seed=settings.DEFAULT_SEED, margin=0.0):
    """Scrambled Sobol points inside the chart box, shrunk by a relative margin."""
    if count <= 0:
        return np.zeros((0, chart.base_dim))
    sampler = qmc.Sobol(d=chart.base_dim, scramble=True, seed=seed)
    unit = sampler.random_base2(max(0, math.ceil(math.log2(count))))[:count]
    width = chart.domain_max - chart.domain_min
    lo = chart.domain_min + margin * width
    hi = chart.domain_max - margin * width
    return qmc.scale(unit, lo, hi)


# ---------------------------------------------------------------------------
# Field evaluation
# ---------------------------------------------------------------------------

def check_point(chart, x):
    if not chart.contains(x):
        raise DomainError(f"point {np.round(x, 6).tolist()} is outside chart '{chart.name}'")


def fields_at(chart, x):
    check_point(chart, x)
    return np.asarray(chart.A_field(x), dtype=float), np.asarray(chart.alpha_field(x), dtype=float)


def _central(f, x, h):
    out = []
    for mu in range(len(x)):
        e = np.zeros(len(x))
        e[mu] = h
        out.append((np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2 * h))
    return np.array(out)


def _numeric_derivative(f, x, h, richardson):
    if not richardson:
        return _central(f, x, h)
    return (4 * _central(f, x, h / 2) - _central(f, x, h)) / 3


def field_derivatives(chart, x):
    """(dA, dalpha), each (n, n, d) with D[mu, nu] = d_mu field_nu."""
    check_point(chart, x)
    x = np.asarray(x, dtype=float)
    if chart.deriv_mode == "analytic":
        return np.asarray(chart.dA_field(x), dtype=float), np.asarray(chart.dalpha_field(x), dtype=float)
    return (_numeric_derivative(chart.A_field, x, chart.step, chart.richardson),
            _numeric_derivative(chart.alpha_field, x, chart.step, chart.richardson))


def frame_condition(chart, x):
    _, alpha = fields_at(chart, x)
    return _checked_condition(alpha)


def _checked_condition(alpha):
    cond = float(np.linalg.cond(alpha))
    if not cond <= settings.MAX_FRAME_CONDITION:
        raise SingularFrameError(f"alpha is singular (condition number {cond:.3g})", condition=cond)
    return cond


def alpha_apply(alpha, u):
    """alpha(u) = sum_mu u^mu alpha_mu."""
    return np.asarray(u) @ alpha


def alpha_inverse(alpha, X):
    """The base vector u with alpha(u) = X."""
    _checked_condition(alpha)
    return np.linalg.solve(alpha.T, X)


def evaluate_form(T, u, v):
    """T(u, v) for an antisymmetric (n, n, d) array of algebra elements."""
    return np.einsum("m,n,mnk->k", u, v, T)


def _pairwise_bracket(alg, P, Q):
    """B[mu, nu] = [P_mu, Q_nu]."""
    return lk.bracket(alg, P[:, None, :], Q[None, :, :])


def curvature_F(chart, x):
    """F[mu, nu] = d_mu A_nu - d_nu A_mu + [A_mu, A_nu]."""
    A, _ = fields_at(chart, x)
    dA, _ = field_derivatives(chart, x)
    return dA - dA.transpose(1, 0, 2) + _pairwise_bracket(chart.algebra, A, A)


def covariant_exterior_d(chart, x):
    """(d_A alpha)[mu, nu] = d_mu alpha_nu - d_nu alpha_mu + [A_mu, alpha_nu] - [A_nu, alpha_mu]."""
    A, alpha = fields_at(chart, x)
    _, dalpha = field_derivatives(chart, x)
    mixed = _pairwise_bracket(chart.algebra, A, alpha)
    return dalpha - dalpha.transpose(1, 0, 2) + mixed - mixed.transpose(1, 0, 2)


def _max_norm(alg, T):
    return float(np.sqrt(np.abs(lk.inner(alg, T, T))).max(initial=0.0))


def integrability_residuals(chart, x):
    """(r1, r2) = (max |(d_A alpha)_{mu nu}|, max |F_{mu nu} - [alpha_mu, alpha_nu]|)."""
    alg = chart.algebra
    _, alpha = fields_at(chart, x)
    r1 = _max_norm(alg, covariant_exterior_d(chart, x))
    r2 = _max_norm(alg, curvature_F(chart, x) - _pairwise_bracket(alg, alpha, alpha))
    return r1, r2


# ---------------------------------------------------------------------------
# J_alpha and the Nijenhuis tensor
# ---------------------------------------------------------------------------

def _ad(chart, k, X):
    return lk.ad_action(chart.algebra, k, X, check=False)


def _ad_inv(chart, k, X):
    return lk.ad_action(chart.algebra, np.linalg.inv(k), X, check=False)


def apply_J(chart, p, v):
    """J_alpha = [[0, -alpha^-1], [alpha, 0]] on the splitting A + V."""
    _, alpha = fields_at(chart, p.x)
    vertical = _ad_inv(chart, p.k, alpha_apply(alpha, v.horizontal))
    horizontal = -alpha_inverse(alpha, _ad(chart, p.k, v.vertical))
    return TangentVector(horizontal, vertical)


def nijenhuis_closed_form(chart, p, X, Y):
    """N(X#, Y#) from chart data.

    With u = alpha^-1(X), w = alpha^-1(Y) at p the horizontal part H satisfies
    alpha(H) = -(d_A alpha)(u, w) and the vertical part is [X, Y] - F_A(u, w).
    """
    alg = chart.algebra
    _, alpha = fields_at(chart, p.x)
    u = alpha_inverse(alpha, _ad(chart, p.k, X))
    w = alpha_inverse(alpha, _ad(chart, p.k, Y))
    D = covariant_exterior_d(chart, p.x)
    F = curvature_F(chart, p.x)
    horizontal = -alpha_inverse(alpha, evaluate_form(D, u, w))
    vertical = lk.bracket(alg, X, Y) - _ad_inv(chart, p.k, evaluate_form(F, u, w))
    return TangentVector(horizontal, vertical)


def _dexp_left(alg, theta):
    """(I - e^{-M}) / M for M = ad_theta, via the exponential of a block matrix."""
    d = alg.dim
    M = lk.ad_matrix(alg, theta)
    block = np.zeros((2 * d, 2 * d))
    block[:d, :d] = -M
    block[:d, d:] = np.eye(d)
    return scipy.linalg.expm(block)[:d, d:]


def _coordinate_field(chart, p0, field):
    """Vector field in coordinates q = (x, theta) around p0, k = k0 exp(theta)."""
    alg = chart.algebra
    n = chart.base_dim

    def f(q):
        x, theta = q[:n], q[n:]
        k = p0.k @ lk.exp_matrix(alg, theta)
        v = field(BundlePoint(x, k))
        A, _ = fields_at(chart, x)
        W = v.vertical - _ad_inv(chart, k, alpha_apply(A, v.horizontal))
        return np.concatenate([v.horizontal, np.linalg.solve(_dexp_left(alg, theta), W)])

    return f


def vector_field_bracket(chart, p, V, W, h=settings.NIJENHUIS_STEP):
    """[V, W] at p for vector fields given as callables BundlePoint -> TangentVector.

    Uses [V, W] = DW.V - DV.W with central directional differences in the
    coordinates (x, theta), k = k(p) exp(theta).
    """
    n = chart.base_dim
    fV = _coordinate_field(chart, p, V)
    fW = _coordinate_field(chart, p, W)
    q0 = np.concatenate([p.x, np.zeros(chart.algebra.dim)])
    vq, wq = fV(q0), fW(q0)

    def directional(f, direction):
        return (f(q0 + h * direction) - f(q0 - h * direction)) / (2 * h)

    r = directional(fW, vq) - directional(fV, wq)
    A, _ = fields_at(chart, p.x)
    horizontal = r[:n]
    vertical = r[n:] + _ad_inv(chart, p.k, alpha_apply(A, horizontal))
    return TangentVector(horizontal, vertical)


def fundamental_field(chart, X):
    return lambda q: vertical_vector(chart, X)


def j_fundamental_field(chart, X):
    return lambda q: apply_J(chart, q, vertical_vector(chart, X))


def nijenhuis_numeric(chart, p, X, Y, h=settings.NIJENHUIS_STEP):
    """N = [JX#, JY#] - [X#, Y#] - J[X#, JY#] - J[JX#, Y#] by finite differences."""
    Xs, Ys = fundamental_field(chart, X), fundamental_field(chart, Y)
    JXs, JYs = j_fundamental_field(chart, X), j_fundamental_field(chart, Y)
    # the h-neighbourhood of p must be inside the chart
    _, alpha = fields_at(chart, p.x)
    reach = h * (1.0 + np.abs(alpha_inverse(alpha, _ad(chart, p.k, X))).max()
                 + np.abs(alpha_inverse(alpha, _ad(chart, p.k, Y))).max())
    if not (chart.contains(p.x - reach) and chart.contains(p.x + reach)):
        raise DomainError(f"finite-difference neighbourhood of radius {reach:.3g} leaves chart '{chart.name}'")
    total = (vector_field_bracket(chart, p, JXs, JYs, h)
             - vector_field_bracket(chart, p, Xs, Ys, h)
             - apply_J(chart, p, vector_field_bracket(chart, p, Xs, JYs, h))
             - apply_J(chart, p, vector_field_bracket(chart, p, JXs, Ys, h)))
    return total
