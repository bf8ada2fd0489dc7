import numpy as np
import pytest

import gauge_field as gf
import lie_kernel as lk
import models
from errors import DomainError, ScenarioError


def test_l_map_is_the_cross_product(rng):
    x, y = rng.standard_normal(3), rng.standard_normal(3)
    np.testing.assert_allclose(models.cross(x, y), np.cross(x, y), atol=1e-14)
    np.testing.assert_allclose(models.LMap()(x), x)


def test_l_map_equivariance(rng):
    R = lk.random_compact(lk.so3(), rng)
    assert models.l_equivariance_residual(R, rng.standard_normal(3)) < 1e-12


def test_vector_product_identity(rng):
    u, v, w = rng.standard_normal((3, 3))
    assert models.vector_product_residual(u, v, w) < 1e-12


def test_hyperbolic_fields_at_unit_height():
    chart = models.build_hyperbolic_chart().chart
    A, alpha = gf.fields_at(chart, np.array([1.0, 2.0, 1.0]))
    np.testing.assert_allclose(alpha, np.eye(3))
    np.testing.assert_allclose(A[0], [0.0, -1.0, 0.0])
    np.testing.assert_allclose(A[1], [1.0, 0.0, 0.0])
    np.testing.assert_allclose(A[2], 0.0)


def test_rotated_hyperbolic_chart_stays_integrable(rng):
    R = lk.random_compact(lk.so3(), rng)
    chart = models.build_hyperbolic_chart(rotation=R).chart
    assert max(gf.integrability_residuals(chart, np.array([0.5, -0.5, 0.7]))) < 1e-12


@pytest.mark.parametrize("K", ["su2", "so3", "t2"])
def test_homogeneous_sample_is_integrable(K):
    chart = models.build_homogeneous_sample(K).chart
    for x in gf.sample_points(chart, 4, seed=5, margin=0.1):
        assert max(gf.integrability_residuals(chart, x)) < 1e-7


def test_homogeneous_origin_frame():
    chart = models.build_homogeneous_sample("su2").chart
    A, alpha = gf.fields_at(chart, np.zeros(3))
    np.testing.assert_allclose(A, 0.0, atol=1e-14)
    np.testing.assert_allclose(alpha, -np.eye(3), atol=1e-14)


def test_homogeneous_group_coordinates(rng):
    model = models.build_homogeneous_sample("su2")
    p = gf.BundlePoint(np.array([0.2, -0.1, 0.3]), lk.random_compact(lk.su2(), rng))
    q = model.from_group(model.to_group(p))
    np.testing.assert_allclose(q.x, p.x, atol=1e-10)
    np.testing.assert_allclose(q.k, p.k, atol=1e-10)
    with pytest.raises(DomainError):
        model.from_group(model.section(np.array([2.0, 0.0, 0.0])))


def test_homogeneous_rejects_unknown_group():
    with pytest.raises(ScenarioError):
        models.build_homogeneous_sample("sp2")


def test_abelian_chart_potential():
    F = models.abelian_field_strength(3, 2.0)
    chart = models.build_abelian_chart(3, F)
    A, alpha = gf.fields_at(chart, np.array([0.5, 0.25, 0.0]))
    # A_nu = 1/2 sum_mu F_{mu nu} x^mu
    np.testing.assert_allclose(A[0], [-0.25, 0.0, 0.0])
    np.testing.assert_allclose(A[1], [0.5, 0.0, 0.0])
    np.testing.assert_allclose(alpha, np.eye(3))


def test_abelian_chart_validation():
    with pytest.raises(ScenarioError):
        models.build_abelian_chart(2, np.ones((2, 2, 2)))
    with pytest.raises(ScenarioError):
        models.build_abelian_chart(2, np.zeros((3, 3, 3)))


def test_build_model_names():
    chart, model = models.build_model("hyperbolic3")
    assert isinstance(model, models.HyperbolicModel)
    chart, model = models.build_model("abelian:2", strength=0.5)
    assert model is None
    assert max(gf.integrability_residuals(chart, np.zeros(2))) == pytest.approx(0.5)
    with pytest.raises(ScenarioError):
        models.build_model("sphere")
    with pytest.raises(ScenarioError):
        models.build_model("abelian:x")
