"""
Exactly solvable charts:

  hyperbolic3   frame bundle of upper half-space H^3 with K = SO(3)
  homog:<K>     G -> G/K with G = K^C, K in {su2, so3, tN}
  abelian:<n>   T^n bundle with constant curvature, alpha = identity
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

import lie_kernel as lk
from errors import DomainError, ScenarioError
from gauge_field import BundlePoint, GaugeChart, chart_from_polynomials, conjugate_chart
from polynomial_fields import PolynomialField, constant_field

logger = logging.getLogger(__name__)

HYPERBOLIC_BOX = (np.array([-3.0, -3.0, 0.1]), np.array([3.0, 3.0, 10.0]))
HOMOGENEOUS_RADIUS = 1.0
ABELIAN_RADIUS = 1.0

MODEL_NAMES = ("hyperbolic3", "homog:su2", "homog:so3", "homog:tN", "abelian:N")


# ---------------------------------------------------------------------------
# L-map
# ---------------------------------------------------------------------------

def l_map(x):
    """L_x as a 3x3 matrix, L_x(y) = x cross y."""
    return lk.to_matrix(lk.so3(), np.asarray(x, dtype=float)).real


def cross(x, y):
    return l_map(x) @ np.asarray(y, dtype=float)


@dataclass(frozen=True)
class LMap:
    """L: R^3 -> so(3); in the L-basis of so(3) its coefficient matrix is the identity."""
    matrix: tuple = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))

    def __call__(self, x):
        return np.asarray(self.matrix) @ np.asarray(x, dtype=float)


def l_equivariance_residual(R, x):
    """|L(Rx) - Ad_R L(x)| for R in SO(3)."""
    alg = lk.so3()
    lhs = LMap()(np.real(R) @ x)
    rhs = lk.ad_action(alg, np.asarray(R, dtype=complex), LMap()(x))
    return float(np.abs(lhs - rhs).max())


def vector_product_residual(u, v, w):
    """(v x w) x u - ((u.v) w - (u.w) v)"""
    return float(np.abs(cross(cross(v, w), u) - ((u @ v) * w - (u @ w) * v)).max())


# ---------------------------------------------------------------------------
# Hyperbolic 3-space
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HyperbolicModel:
    chart: GaugeChart
    frame_section: str = "e_i = x3 d_i"


def _hyperbolic_A(x):
    t = x[2]
    return np.array([[0.0, -1.0 / t, 0.0],
                     [1.0 / t, 0.0, 0.0],
                     [0.0, 0.0, 0.0]])


def _hyperbolic_alpha(x):
    return np.eye(3) / x[2]


def _hyperbolic_dA(x):
    t2 = x[2] ** 2
    d = np.zeros((3, 3, 3))
    d[2, 0] = [0.0, 1.0 / t2, 0.0]
    d[2, 1] = [-1.0 / t2, 0.0, 0.0]
    return d


def _hyperbolic_dalpha(x):
    d = np.zeros((3, 3, 3))
    d[2] = -np.eye(3) / x[2] ** 2
    return d


def build_hyperbolic_chart(rotation=None, deriv_mode="analytic"):
    """Levi-Civita connection of (dx^2 + dy^2 + dt^2)/t^2 in the frame e_i = t d_i,
    with alpha = L o (frame coefficients). rotation applies a constant gauge."""
    lo, hi = HYPERBOLIC_BOX
    chart = GaugeChart(
        algebra=lk.so3(),
        domain_min=lo,
        domain_max=hi,
        A_field=_hyperbolic_A,
        alpha_field=_hyperbolic_alpha,
        dA_field=_hyperbolic_dA if deriv_mode == "analytic" else None,
        dalpha_field=_hyperbolic_dalpha if deriv_mode == "analytic" else None,
        deriv_mode=deriv_mode,
        name="hyperbolic3",
    )
    if rotation is not None:
        chart = conjugate_chart(chart, np.asarray(rotation, dtype=complex))
    logger.debug("built hyperbolic chart (%s derivatives)", deriv_mode)
    return HyperbolicModel(chart)


# ---------------------------------------------------------------------------
# Homogeneous sample G -> G/K
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HomogeneousSample:
    """Chart on G -> G/K through the section s(y) = g0 exp(i Y(y)), Y(y) = sum y_mu e_mu.
    A point (y, k) of the trivialisation is the group element s(y) k."""
    chart: GaugeChart
    base_point: np.ndarray

    @property
    def algebra(self):
        return self.chart.algebra

    def section(self, y):
        return self.base_point @ lk.exp_matrix(self.algebra, 1j * np.asarray(y, dtype=float))

    def to_group(self, p):
        return self.section(p.x) @ p.k

    def from_group(self, g):
        """Inverse of to_group via the left polar decomposition g0^-1 g = exp(iY) k."""
        m = np.linalg.solve(self.base_point, np.asarray(g, dtype=complex))
        if self.algebra.kind == "torus":
            d = np.diag(m)
            y = -np.log(np.abs(d))
            k = np.diag(d / np.abs(d))
        else:
            k, P = scipy.linalg.polar(m, side="left")
            w, V = np.linalg.eigh((P + P.conj().T) / 2)
            if np.min(w) <= 0.0:
                raise DomainError("group element is singular")
            H = (V * np.log(w)) @ V.conj().T
            y = lk.from_matrix(self.algebra, -1j * H, real=True)
            if self.algebra.kind == "so3":
                k = k.real.astype(complex)
        p = BundlePoint(y, k)
        if not self.chart.contains(p.x):
            raise DomainError(f"group element projects outside chart '{self.chart.name}'")
        return p


def _left_dexp(alg, Z):
    """(I - e^{-M}) / M with M = ad_Z, Z complex."""
    d = alg.dim
    block = np.zeros((2 * d, 2 * d), dtype=complex)
    block[:d, :d] = -lk.ad_matrix(alg, Z)
    block[:d, d:] = np.eye(d)
    return scipy.linalg.expm(block)[:d, d:]


def _pulled_back_maurer_cartan(alg, y):
    """Rows mu: s^{-1} d_mu s = Phi(i e_mu) with Phi = (I - e^{-M})/M, M = ad_{iY}."""
    Phi = _left_dexp(alg, 1j * np.asarray(y, dtype=float))
    return 1j * Phi.T


def build_homogeneous_sample(K, base_point=None, radius=HOMOGENEOUS_RADIUS):
    """A = Re(s* theta), alpha = -Im(s* theta) for the left Maurer-Cartan form theta,
    so alpha((X + iY)#) = -Y and omega_A((X + iY)#) = X."""
    try:
        alg = lk.get_algebra(K)
    except ValueError as e:
        raise ScenarioError(f"unsupported structure group for the homogeneous sample: {e}")
    n = alg.dim
    g0 = lk.identity(alg) if base_point is None else np.asarray(base_point, dtype=complex)
    lk.check_complex(alg, g0)
    lo, hi = -radius * np.ones(n), radius * np.ones(n)
    if alg.kind == "torus":
        # abelian: s* theta = i dy exactly
        chart = chart_from_polynomials(alg, lo, hi, constant_field(np.zeros((n, n))),
                                       constant_field(-np.eye(n)), name=f"homog:{alg.name}")
    else:
        chart = GaugeChart(
            algebra=alg,
            domain_min=lo,
            domain_max=hi,
            A_field=lambda y: _pulled_back_maurer_cartan(alg, y).real,
            alpha_field=lambda y: -_pulled_back_maurer_cartan(alg, y).imag,
            deriv_mode="numeric",
            step=1e-3,
            richardson=True,
            name=f"homog:{alg.name}",
        )
    logger.debug("built homogeneous sample for %s", alg.name)
    return HomogeneousSample(chart, g0)


# ---------------------------------------------------------------------------
# Abelian torus case
# ---------------------------------------------------------------------------

def abelian_field_strength(n, strength=1.0):
    """F_{01} = strength * e_0, antisymmetrised; zero for n = 1."""
    F = np.zeros((n, n, n))
    if n >= 2:
        F[0, 1, 0] = strength
        F[1, 0, 0] = -strength
    return F


def build_abelian_chart(n, F_spec=None, radius=ABELIAN_RADIUS):
    """t^n chart with alpha = identity and A_nu = 1/2 sum_mu F_{mu nu} x^mu."""
    if n < 1:
        raise ValueError("abelian chart needs n >= 1")
    alg = lk.torus(n)
    F = np.zeros((n, n, n)) if F_spec is None else np.asarray(F_spec, dtype=float)
    if F.shape != (n, n, n):
        raise ScenarioError(f"F_spec must have shape {(n, n, n)}, got {F.shape}")
    if np.abs(F + F.transpose(1, 0, 2)).max() > 0.0:
        raise ScenarioError("F_spec must be antisymmetric in its first two indices")
    A_poly = PolynomialField(np.eye(n, dtype=int), 0.5 * F)
    lo, hi = -radius * np.ones(n), radius * np.ones(n)
    return chart_from_polynomials(alg, lo, hi, A_poly, constant_field(np.eye(n)), name=f"abelian:{n}")


def build_model(name, **options):
    """Resolves a CLI model name to a GaugeChart (and the model wrapper, if any)."""
    key = str(name).strip().lower()
    if key == "hyperbolic3":
        model = build_hyperbolic_chart(rotation=options.get("rotation"))
        return model.chart, model
    if key.startswith("homog:"):
        model = build_homogeneous_sample(key.split(":", 1)[1])
        return model.chart, model
    if key.startswith("abelian:"):
        try:
            n = int(key.split(":", 1)[1])
        except ValueError:
            raise ScenarioError(f"abelian model needs an integer dimension, got '{name}'")
        F = options.get("F")
        if F is None and options.get("strength") is not None:
            F = abelian_field_strength(n, float(options["strength"]))
        return build_abelian_chart(n, F), None
    raise ScenarioError(f"unknown model '{name}'; expected one of {', '.join(MODEL_NAMES)}")
