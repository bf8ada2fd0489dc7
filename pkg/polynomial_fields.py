"""
Multivariate polynomial fields x -> (m, d) arrays with exact derivatives.
Used for user-supplied chart data and random test charts.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from errors import DimensionMismatchError, ScenarioError


@dataclass(frozen=True, eq=False)
class PolynomialField:
    """sum_t coeffs[t] * prod_mu x_mu ** powers[t, mu]

    powers: (T, n) non-negative integers; coeffs: (T, m, d).
    """
    powers: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        powers = np.asarray(self.powers, dtype=int)
        coeffs = np.asarray(self.coeffs, dtype=float)
        if powers.ndim != 2 or coeffs.ndim != 3 or powers.shape[0] != coeffs.shape[0]:
            raise DimensionMismatchError(
                f"powers {powers.shape} and coeffs {coeffs.shape} do not describe the same terms")
        if (powers < 0).any():
            raise ValueError("monomial powers must be non-negative")
        object.__setattr__(self, "powers", powers)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def n_vars(self):
        return self.powers.shape[1]

    @property
    def shape(self):
        return self.coeffs.shape[1:]

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        monomials = np.prod(x[None, :] ** self.powers, axis=1)
        return np.tensordot(monomials, self.coeffs, axes=(0, 0))

    def derivative(self, x):
        """Array D with D[mu] = d/dx_mu of the field, shape (n, m, d)."""
        x = np.asarray(x, dtype=float)
        out = np.empty((self.n_vars,) + self.shape)
        for mu in range(self.n_vars):
            reduced = self.powers.copy()
            reduced[:, mu] = np.maximum(reduced[:, mu] - 1, 0)
            factor = self.powers[:, mu] * np.prod(x[None, :] ** reduced, axis=1)
            out[mu] = np.tensordot(factor, self.coeffs, axes=(0, 0))
        return out

    def scaled(self, s):
        return PolynomialField(self.powers, s * self.coeffs)

    def transformed(self, matrix):
        """Applies a linear map to the value index d (e.g. a constant Ad_g)."""
        return PolynomialField(self.powers, np.einsum("ab,tmb->tma", matrix, self.coeffs))

    def to_json(self):
        return {"terms": [{"powers": p.tolist(), "coeffs": c.tolist()}
                          for p, c in zip(self.powers, self.coeffs)]}

    @classmethod
    def from_json(cls, doc, n_vars=None, shape=None):
        try:
            terms = doc["terms"]
            powers = [t["powers"] for t in terms]
            coeffs = [t["coeffs"] for t in terms]
        except (KeyError, TypeError) as e:
            raise ScenarioError(f"polynomial field needs a 'terms' list of powers/coeffs: {e}")
        if not terms:
            if n_vars is None or shape is None:
                raise ScenarioError("empty polynomial field needs an explicit shape")
            return zero_field(n_vars, shape)
        field = cls(np.asarray(powers), np.asarray(coeffs))
        if n_vars is not None and field.n_vars != n_vars:
            raise ScenarioError(f"polynomial field has {field.n_vars} variables, expected {n_vars}")
        if shape is not None and tuple(field.shape) != tuple(shape):
            raise ScenarioError(f"polynomial field values are {field.shape}, expected {tuple(shape)}")
        return field


def zero_field(n_vars, shape):
    return PolynomialField(np.zeros((1, n_vars), dtype=int), np.zeros((1,) + tuple(shape)))


def constant_field(value):
    value = np.asarray(value, dtype=float)
    return PolynomialField(np.zeros((1, value.shape[0]), dtype=int), value[None])


def monomial_powers(n_vars, degree):
    """All exponent vectors of total degree <= degree, constant term first."""
    return np.array([p for p in itertools.product(range(degree + 1), repeat=n_vars)
                     if sum(p) <= degree], dtype=int)


def random_polynomial_field(rng, n_vars, dim, degree=2, scale=0.3, offset=None):
    """Random field with values of shape (n_vars, dim); offset is added to the constant term."""
    powers = monomial_powers(n_vars, degree)
    coeffs = scale * rng.standard_normal((len(powers), n_vars, dim))
    if offset is not None:
        coeffs[0] += np.asarray(offset, dtype=float)
    return PolynomialField(powers, coeffs)
