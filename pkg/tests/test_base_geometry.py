import numpy as np
import pytest

import base_geometry as bg
import gauge_field as gf
import models
from errors import PreconditionError


def test_hyperbolic_metric(hyperbolic):
    x = np.array([0.4, -1.0, 2.0])
    np.testing.assert_allclose(bg.induced_metric(hyperbolic, x).g_matrix, np.eye(3) / 4.0)


def test_hyperbolic_sectional_curvature_is_minus_one(hyperbolic, rng):
    for x in gf.sample_points(hyperbolic, 6, seed=2, margin=0.05):
        u, v = bg.random_plane(rng, 3)
        assert bg.sectional_curvature(hyperbolic, x, u, v) == pytest.approx(-1.0, abs=1e-12)


@pytest.mark.parametrize("name,expected", [("homog:su2", -2.0), ("homog:so3", -1.0), ("homog:t3", 0.0)])
def test_homogeneous_sectional_curvature(name, expected, rng):
    chart, _ = models.build_model(name)
    for x in (np.zeros(3), np.array([0.3, -0.2, 0.5])):
        u, v = bg.random_plane(rng, 3)
        assert bg.sectional_curvature(chart, x, u, v) == pytest.approx(expected, abs=1e-10)


def test_sectional_curvature_agrees_with_riemann_tensor(hyperbolic, rng):
    for x in gf.sample_points(hyperbolic, 4, seed=5, margin=0.05):
        u, v = bg.random_plane(rng, 3)
        g = bg.induced_metric(hyperbolic, x).g_matrix
        e1, e2 = bg.orthonormalize(g, u, v)
        K = e1 @ g @ bg.riemann_curvature(hyperbolic, x, e1, e2, e2)
        assert bg.sectional_curvature(hyperbolic, x, u, v) == pytest.approx(K, abs=1e-10)


def test_riemann_tensor_of_constant_curvature(hyperbolic):
    x = np.array([0.0, 0.0, 2.0])
    e1, e2 = np.eye(3)[0], np.eye(3)[1]
    # R(u, v)w = g(u, w) v - g(v, w) u with g = I / 4
    np.testing.assert_allclose(bg.riemann_curvature(hyperbolic, x, e1, e2, e2), -e1 / 4.0, atol=1e-14)
    np.testing.assert_allclose(bg.riemann_curvature(hyperbolic, x, e1, e2, e1), e2 / 4.0, atol=1e-14)


def test_riemann_needs_integrability():
    chart = models.build_abelian_chart(2, models.abelian_field_strength(2, 0.3))
    with pytest.raises(PreconditionError):
        bg.riemann_curvature(chart, np.zeros(2), np.eye(2)[0], np.eye(2)[1], np.eye(2)[0])
    forced = bg.riemann_curvature(chart, np.zeros(2), np.eye(2)[0], np.eye(2)[1], np.eye(2)[0], force=True)
    np.testing.assert_allclose(forced, 0.0)


def test_torsion_vanishes_on_hyperbolic(hyperbolic, rng):
    u, v = bg.random_plane(rng, 3)
    np.testing.assert_allclose(bg.torsion(hyperbolic, np.array([1.0, 1.0, 3.0]), u, v), 0.0, atol=1e-13)


def test_orthonormalize_rejects_degenerate_planes():
    g = np.eye(2)
    with pytest.raises(PreconditionError):
        bg.orthonormalize(g, [1.0, 0.0], [2.0, 0.0])
    with pytest.raises(PreconditionError):
        bg.orthonormalize(g, [0.0, 0.0], [1.0, 0.0])
    e1, e2 = bg.orthonormalize(np.diag([4.0, 1.0]), [1.0, 0.0], [1.0, 1.0])
    np.testing.assert_allclose(e1, [0.5, 0.0])
    np.testing.assert_allclose(e2, [0.0, 1.0])


def test_induced_curvature_operator(hyperbolic):
    x = np.array([0.0, 0.0, 1.0])
    e = np.eye(3)
    # F(e1, e2) = [alpha_1, alpha_2] = e3 on so(3)
    np.testing.assert_allclose(bg.induced_curvature_operator(hyperbolic, x, e[0], e[1], e[0]), e[1], atol=1e-14)


def test_curvature_report(hyperbolic):
    rec = bg.curvature_report(hyperbolic, np.array([0.0, 0.0, 1.0]), [1, 2, 3])
    assert set(rec) == {"x", "g_matrix", "sectional_samples", "residuals"}
    assert [s["plane_seed"] for s in rec["sectional_samples"]] == [1, 2, 3]
    assert all(s["K"] == pytest.approx(-1.0) for s in rec["sectional_samples"])
    assert max(rec["residuals"]) < 1e-12


def test_torsion_is_the_covariant_derivative_of_the_frame(random_chart, rng):
    for x in gf.sample_points(random_chart, 5, seed=4, margin=0.05):
        u, v = bg.random_plane(rng, 3)
        _, alpha = gf.fields_at(random_chart, x)
        expected = gf.evaluate_form(gf.covariant_exterior_d(random_chart, x), u, v)
        np.testing.assert_allclose(gf.alpha_apply(alpha, bg.torsion(random_chart, x, u, v)), expected, atol=1e-10)
        assert np.linalg.norm(expected) > 1e-6


@pytest.mark.parametrize("name", ["hyperbolic3", "homog:su2", "homog:so3", "homog:t3", "abelian:2"])
def test_sectional_curvature_is_never_positive(name, rng):
    chart, _ = models.build_model(name)
    for x in gf.sample_points(chart, 4, seed=6, margin=0.05):
        for _ in range(3):
            u, v = bg.random_plane(rng, chart.base_dim)
            K = bg.sectional_curvature(chart, x, u, v)
            assert K <= 1e-12
            if chart.algebra.kind != "torus":
                assert K < -1e-6


def test_sectional_curvature_is_never_positive_on_random_charts(random_chart, rng):
    for x in gf.sample_points(random_chart, 4, seed=8, margin=0.05):
        u, v = bg.random_plane(rng, 3)
        assert bg.sectional_curvature(random_chart, x, u, v) <= 1e-12
