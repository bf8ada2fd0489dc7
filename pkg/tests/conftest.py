import os
import sys

import numpy as np
import pytest
from scipy.integrate import solve_ivp

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

import lie_kernel as lk  # noqa: E402
import models  # noqa: E402
from gauge_field import chart_from_polynomials  # noqa: E402
from polynomial_fields import random_polynomial_field  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def hyperbolic():
    return models.build_hyperbolic_chart().chart


@pytest.fixture
def random_chart():
    """su(2) chart with random quadratic A and alpha close to the identity frame."""
    gen = np.random.default_rng(7)
    A = random_polynomial_field(gen, 3, 3, degree=2, scale=0.2)
    alpha = random_polynomial_field(gen, 3, 3, degree=2, scale=0.1, offset=np.eye(3))
    return chart_from_polynomials(lk.su2(), -0.5 * np.ones(3), 0.5 * np.ones(3), A, alpha, name="random")


def _half_space_christoffel(x):
    """Gamma[k, i, j] of (dx^2 + dy^2 + dt^2) / t^2 from the metric derivatives."""
    t = x[2]
    g_inv = t ** 2 * np.eye(3)
    dg = np.zeros((3, 3, 3))
    dg[2] = -2.0 / t ** 3 * np.eye(3)
    lower = (np.einsum("ilj->lij", dg) + np.einsum("jli->lij", dg) - dg) / 2
    return np.einsum("kl,lij->kij", g_inv, lower)


@pytest.fixture
def half_space_geodesic():
    """Reference geodesic of upper half-space by the Christoffel equations."""
    def solve(x0, v, t):
        def rhs(_, y):
            x, xdot = y[:3], y[3:]
            return np.concatenate([xdot, -np.einsum("kij,i,j->k", _half_space_christoffel(x), xdot, xdot)])

        sol = solve_ivp(rhs, (0.0, t), np.concatenate([x0, v]), method="DOP853", rtol=1e-12, atol=1e-13)
        return sol.y[:3, -1]
    return solve


@pytest.fixture
def half_space_transport():
    """Levi-Civita parallel transport of a base vector along a polyline of upper half-space."""
    def solve(path, V0):
        path = np.asarray(path, dtype=float)
        V = np.asarray(V0, dtype=float)
        for a, b in zip(path[:-1], path[1:]):
            xdot = b - a

            def rhs(s, W, a=a, xdot=xdot):
                return -np.einsum("kij,i,j->k", _half_space_christoffel(a + s * xdot), xdot, W)

            V = solve_ivp(rhs, (0.0, 1.0), V, method="DOP853", rtol=1e-12, atol=1e-13).y[:, -1]
        return V
    return solve
