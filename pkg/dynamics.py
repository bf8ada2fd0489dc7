"""
Flows of X# and J_alpha X#, geodesics of g_alpha, parallel transport,
the complexified action psi and the holomorphic form omega.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

import lie_kernel as lk
import settings
from errors import BranchCutError, ChartExitError, DomainError, IntegratorError, PreconditionError
from gauge_field import (BundlePoint, TangentVector, alpha_apply, alpha_inverse, apply_J,
                         fields_at, fundamental_field, j_fundamental_field, vector_field_bracket,
                         vertical_vector)

logger = logging.getLogger(__name__)

SCHEMES = ("rk4",)


@dataclass(frozen=True)
class IntegratorConfig:
    step: float = settings.INTEGRATOR_STEP
    scheme: str = "rk4"
    max_steps: int = settings.INTEGRATOR_MAX_STEPS

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("integrator step must be positive")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown integrator scheme '{self.scheme}'")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")

    def steps_for(self, t):
        n = max(1, math.ceil(abs(t) / self.step - 1e-9))
        if n > self.max_steps:
            raise IntegratorError(f"time {t} needs {n} steps, more than max_steps={self.max_steps}")
        return n


@dataclass(frozen=True, eq=False)
class FlowState:
    p: BundlePoint
    t: float


def _rk4_step(f, y, dt):
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _pack(p):
    return np.concatenate([p.x.astype(complex), p.k.reshape(-1)])


def _unpack(y, n, m):
    return y[:n].real.copy(), y[n:].reshape(m, m)


# ---------------------------------------------------------------------------
# Flows
# ---------------------------------------------------------------------------

def flow_vertical(chart, p, X, t):
    """phi^t_{X#}(p) = p exp(tX), in closed form."""
    return BundlePoint(p.x, p.k @ lk.exp_matrix(chart.algebra, t * np.asarray(X, dtype=float)))


def j_velocity(chart, x, k, X):
    """Base velocity of J X# at (x, k): -alpha^-1(Ad_k X)."""
    _, alpha = fields_at(chart, x)
    return -alpha_inverse(alpha, lk.ad_action(chart.algebra, k, X, check=False))


def _horizontal_rhs(chart, n, m, velocity):
    alg = chart.algebra

    def f(y):
        x, k = _unpack(y, n, m)
        xdot = velocity(x, k)
        A, _ = fields_at(chart, x)
        kdot = -lk.to_matrix(alg, alpha_apply(A, xdot)) @ k
        return np.concatenate([xdot.astype(complex), kdot.reshape(-1)])

    return f


def _integrate(chart, p, t, cfg, velocity, record):
    alg = chart.algebra
    n, m = chart.base_dim, alg.rep_dim
    steps = cfg.steps_for(t)
    dt = t / steps
    f = _horizontal_rhs(chart, n, m, velocity)
    states = [FlowState(p, 0.0)]
    y = _pack(p)
    current = p
    for i in range(steps):
        try:
            y = _rk4_step(f, y, dt)
        except DomainError:
            raise ChartExitError(f"trajectory left chart '{chart.name}' near t = {i * dt:.6g}",
                                 exit_time=i * dt, last_point=current)
        x, k = _unpack(y, n, m)
        if not np.all(np.isfinite(y)) or np.abs(k).max() > settings.GROUP_NORM_BOUND:
            raise IntegratorError(f"integration blew up at t = {(i + 1) * dt:.6g}")
        if not chart.contains(x):
            logger.warning("chart exit at t=%.6g on %s", (i + 1) * dt, chart.name)
            raise ChartExitError(f"trajectory left chart '{chart.name}' at t = {(i + 1) * dt:.6g}",
                                 exit_time=(i + 1) * dt, last_point=current)
        k = lk.project_to_compact(alg, k)
        current = BundlePoint(x, k)
        y = _pack(current)
        if record:
            states.append(FlowState(current, (i + 1) * dt))
    return states if record else [FlowState(current, t)]


def integrate_horizontal_J(chart, p, X, t, cfg=None):
    """Trajectory of J X# as a list of FlowState, including t = 0."""
    cfg = cfg or IntegratorConfig()
    X = np.asarray(X, dtype=float)
    return _integrate(chart, p, t, cfg, lambda x, k: j_velocity(chart, x, k, X), record=True)


def flow_horizontal_J(chart, p, X, t, cfg=None):
    """phi^t_{J X#}(p): RK4 on (x, k) with xdot = -alpha^-1(Ad_k X), kdot = -A(xdot) k."""
    if t == 0:
        return p
    cfg = cfg or IntegratorConfig()
    X = np.asarray(X, dtype=float)
    return _integrate(chart, p, t, cfg, lambda x, k: j_velocity(chart, x, k, X), record=False)[-1].p


def holomorphic_flow_map(chart, p, X, s, t, cfg=None):
    """s + it -> phi^t_{J X#}(phi^s_{X#}(p))"""
    return flow_horizontal_J(chart, flow_vertical(chart, p, X, s), X, t, cfg)


def batch_flow(chart, points, X, t, cfg=None):
    return [flow_horizontal_J(chart, p, X, t, cfg) for p in points]


# ---------------------------------------------------------------------------
# Geodesics
# ---------------------------------------------------------------------------

def shooting_element(chart, x, v, k=None):
    """X with pi_* J X#(x, k) = v, i.e. X = -Ad_{k^-1} alpha(v)."""
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        raise PreconditionError("initial velocity must be non-zero")
    _, alpha = fields_at(chart, x)
    X = -alpha_apply(alpha, v)
    if k is not None:
        X = lk.ad_action(chart.algebra, np.linalg.inv(k), X, check=False)
    return X


def geodesic_shoot(chart, x, v, t, cfg=None):
    """Base point reached by the geodesic through x with initial velocity v after time t."""
    X = shooting_element(chart, x, v)
    p = BundlePoint(x, lk.identity(chart.algebra))
    return flow_horizontal_J(chart, p, X, t, cfg).x


def geodesic_trajectory(chart, x, v, t, cfg=None):
    X = shooting_element(chart, x, v)
    return X, integrate_horizontal_J(chart, BundlePoint(x, lk.identity(chart.algebra)), X, t, cfg)


def speed_profile(chart, states, X):
    """|xdot|_{g_alpha} along a J-flow trajectory."""
    alg = chart.algebra
    out = []
    for s in states:
        xdot = j_velocity(chart, s.p.x, s.p.k, X)
        _, alpha = fields_at(chart, s.p.x)
        a = alpha_apply(alpha, xdot)
        out.append(float(np.sqrt(lk.inner(alg, a, a))))
    return np.array(out)


def geodesic_residual(chart, states):
    """max |nabla_c' c'| from central differences of Ad_{k^-1} alpha(c') along the lift.

    Both differences are central, so the two end states only enter through
    their neighbours' velocities.
    """
    if len(states) < 5:
        return 0.0
    alg = chart.algebra
    ts = np.array([s.t for s in states])
    xs = np.array([s.p.x for s in states])
    xdots = (xs[2:] - xs[:-2]) / (ts[2:] - ts[:-2])[:, None]
    reps = []
    for s, xdot in zip(states[1:-1], xdots):
        _, alpha = fields_at(chart, s.p.x)
        reps.append(lk.ad_action(alg, np.linalg.inv(s.p.k), alpha_apply(alpha, xdot), check=False))
    reps = np.array(reps)
    accel = (reps[2:] - reps[:-2]) / (ts[3:-1] - ts[1:-3])[:, None]
    return float(np.sqrt(np.abs(lk.inner(alg, accel, accel))).max())


# ---------------------------------------------------------------------------
# Parallel transport
# ---------------------------------------------------------------------------

def horizontal_lift(chart, path, k0=None, substeps=50):
    """k at the end of the horizontal lift (kdot = -A(xdot) k) of a polyline."""
    alg = chart.algebra
    path = np.asarray(path, dtype=float)
    k = lk.identity(alg) if k0 is None else np.asarray(k0, dtype=complex)
    for a, b in zip(path[:-1], path[1:]):
        xdot = b - a
        if not np.any(xdot):
            continue

        def f(tau, kk, a=a, xdot=xdot):
            try:
                A, _ = fields_at(chart, a + tau * xdot)
            except DomainError:
                raise ChartExitError(f"path leaves chart '{chart.name}'", last_point=a)
            return -lk.to_matrix(alg, alpha_apply(A, xdot)) @ kk

        h = 1.0 / substeps
        for i in range(substeps):
            tau = i * h
            k1 = f(tau, k)
            k2 = f(tau + h / 2, k + h / 2 * k1)
            k3 = f(tau + h / 2, k + h / 2 * k2)
            k4 = f(tau + h, k + h * k3)
            k = lk.project_to_compact(alg, k + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4))
    return k


def parallel_transport(chart, path, s, substeps=50):
    """Transport of s in ad(P) along a base polyline, returned in the chart's gauge."""
    path = np.asarray(path, dtype=float)
    for x in path:
        if not chart.contains(x):
            raise ChartExitError(f"path vertex {x.tolist()} is outside chart '{chart.name}'")
    k = horizontal_lift(chart, path, substeps=substeps)
    return lk.ad_action(chart.algebra, k, np.asarray(s, dtype=float), check=False)


# ---------------------------------------------------------------------------
# Complexified action and omega
# ---------------------------------------------------------------------------

def complexified_action(chart, p, g, cfg=None):
    """psi(p, k exp(iX)) = phi^1_{J X#}(p k)"""
    alg = chart.algebra
    k, X = lk.kp_decompose(alg, g)
    if lk.norm(alg, X) >= settings.KP_NORM_LIMIT:
        raise BranchCutError(f"|X| = {lk.norm(alg, X):.3g} is beyond the polar branch radius")
    q = BundlePoint(p.x, p.k @ k)
    if lk.norm(alg, X) < 1e-14:
        return q
    return flow_horizontal_J(chart, q, X, 1.0, cfg)


def omega_form(chart, p, v):
    """omega(v) = omega_A(v) - i alpha(v)"""
    _, alpha = fields_at(chart, p.x)
    a = lk.ad_action(chart.algebra, np.linalg.inv(p.k), alpha_apply(alpha, v.horizontal), check=False)
    return v.vertical - 1j * a


def tangent_from_omega(chart, p, xi):
    xi = np.asarray(xi, dtype=complex)
    _, alpha = fields_at(chart, p.x)
    h = alpha_inverse(alpha, lk.ad_action(chart.algebra, p.k, -xi.imag, check=False))
    return TangentVector(h, xi.real)


def tangent_between(chart, p, q, h):
    """Difference quotient (q - p)/h as a TangentVector at p."""
    alg = chart.algebra
    xdot = (q.x - p.x) / h
    W = lk.from_matrix(alg, scipy.linalg.logm(np.linalg.solve(p.k, q.k)), real=True) / h
    A, _ = fields_at(chart, p.x)
    vertical = W + lk.ad_action(alg, np.linalg.inv(p.k), alpha_apply(A, xdot), check=False)
    return TangentVector(xdot, vertical)


def psi_derivative_check(chart, p, X, h=1e-4, cfg=None):
    """(|d psi(p, exp(hX)) - X#|, |d psi(p, exp(ihX)) - J X#|), both O(h)."""
    alg = chart.algebra
    X = np.asarray(X, dtype=float)
    if not np.any(X):
        return 0.0, 0.0
    Xs = vertical_vector(chart, X)
    real_dir = tangent_between(chart, p, complexified_action(chart, p, lk.exp_matrix(alg, h * X), cfg), h)
    imag_dir = tangent_between(chart, p, complexified_action(chart, p, lk.exp_matrix(alg, 1j * h * X), cfg), h)
    return (real_dir - Xs).norm(), (imag_dir - apply_J(chart, p, Xs)).norm()


def psi_bracket_check(chart, p, X, Y, h=settings.NIJENHUIS_STEP):
    """Residuals of [X#, Y#] = [X,Y]#, [X#, JY#] = J[X,Y]# and [JX#, JY#] = -[X,Y]#.

    The third holds only where J_alpha is integrable."""
    XY = vertical_vector(chart, lk.bracket(chart.algebra, X, Y))
    Xs, Ys = fundamental_field(chart, X), fundamental_field(chart, Y)
    JXs, JYs = j_fundamental_field(chart, X), j_fundamental_field(chart, Y)
    return {
        "vertical": (vector_field_bracket(chart, p, Xs, Ys, h) - XY).norm(),
        "mixed": (vector_field_bracket(chart, p, Xs, JYs, h) - apply_J(chart, p, XY)).norm(),
        "horizontal": (vector_field_bracket(chart, p, JXs, JYs, h) + XY).norm(),
    }
