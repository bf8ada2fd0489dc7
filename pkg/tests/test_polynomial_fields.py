import numpy as np
import pytest

from errors import DimensionMismatchError, ScenarioError
from polynomial_fields import (PolynomialField, constant_field, monomial_powers,
                               random_polynomial_field, zero_field)


def _field():
    # f(x, y) = c0 + c1 * x + c2 * y^2 with (2, 1)-shaped values
    powers = [[0, 0], [1, 0], [0, 2]]
    coeffs = np.array([[[1.0], [0.0]], [[2.0], [1.0]], [[0.0], [-3.0]]])
    return PolynomialField(powers, coeffs)


def test_evaluate():
    f = _field()
    np.testing.assert_allclose(f.evaluate([0.5, 2.0]), [[2.0], [0.5 - 12.0]])


def test_derivative_matches_central_difference(rng):
    f = random_polynomial_field(rng, 3, 3, degree=3)
    x = rng.uniform(-1, 1, 3)
    h = 1e-6
    for mu in range(3):
        e = np.zeros(3)
        e[mu] = h
        numeric = (f.evaluate(x + e) - f.evaluate(x - e)) / (2 * h)
        np.testing.assert_allclose(f.derivative(x)[mu], numeric, atol=1e-7)


def test_derivative_at_origin_of_constant_term():
    f = _field()
    D = f.derivative([0.0, 0.0])
    np.testing.assert_allclose(D[0], [[2.0], [1.0]])
    np.testing.assert_allclose(D[1], [[0.0], [0.0]])


def test_transformed_and_scaled(rng):
    f = random_polynomial_field(rng, 2, 2, degree=1)
    M = np.array([[0.0, 1.0], [-1.0, 0.0]])
    x = np.array([0.3, -0.7])
    np.testing.assert_allclose(f.transformed(M).evaluate(x), f.evaluate(x) @ M.T)
    np.testing.assert_allclose(f.scaled(-2.0).evaluate(x), -2.0 * f.evaluate(x))


def test_monomial_powers():
    p = monomial_powers(2, 2)
    assert len(p) == 6
    assert p[0].tolist() == [0, 0]
    assert p.sum(axis=1).max() == 2


def test_constant_and_zero_fields():
    c = constant_field(np.eye(3))
    np.testing.assert_allclose(c.evaluate([1.0, 2.0, 3.0]), np.eye(3))
    np.testing.assert_allclose(c.derivative([1.0, 2.0, 3.0]), np.zeros((3, 3, 3)))
    z = zero_field(2, (2, 2))
    np.testing.assert_allclose(z.evaluate([4.0, 5.0]), np.zeros((2, 2)))


def test_random_field_offset():
    f = random_polynomial_field(np.random.default_rng(0), 3, 3, scale=0.0, offset=np.eye(3))
    np.testing.assert_allclose(f.evaluate([0.2, 0.1, -0.3]), np.eye(3))


def test_from_json_checks_shape():
    doc = _field().to_json()
    f = PolynomialField.from_json(doc, n_vars=2, shape=(2, 1))
    np.testing.assert_allclose(f.evaluate([1.0, 1.0]), _field().evaluate([1.0, 1.0]))
    with pytest.raises(ScenarioError):
        PolynomialField.from_json(doc, n_vars=3)
    with pytest.raises(ScenarioError):
        PolynomialField.from_json(doc, shape=(3, 3))
    with pytest.raises(ScenarioError):
        PolynomialField.from_json({"terms": []})
    with pytest.raises(ScenarioError):
        PolynomialField.from_json({"coeffs": []})


def test_mismatched_terms_rejected():
    with pytest.raises(DimensionMismatchError):
        PolynomialField(np.zeros((2, 3), dtype=int), np.zeros((3, 3, 3)))
    with pytest.raises(ValueError):
        PolynomialField([[-1]], np.zeros((1, 1, 1)))
