"""
Lie algebra kernel: structure-constant arithmetic, invariant inner products,
matrix groups K in {SU(2), SO(3), T^n} and their complexifications G = K^C.

Algebra elements are coefficient vectors in the algebra's basis (real arrays
for k, complex arrays for g = k (x) C, X + iY <-> X + 1j*Y). Group elements are
square matrices in the defining representation.
"""

import json
import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
import scipy.linalg

import settings
from errors import (BranchCutError, ConvergenceError, DimensionMismatchError,
                    GroupMembershipError)

logger = logging.getLogger(__name__)

SQRT2 = np.sqrt(2.0)

PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)

LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_j, _i, _k] = -1.0

KINDS = ("su2", "so3", "torus", "generic")


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Compact Lie algebra given by structure constants c[i, j, k] and an
    ad-invariant inner product. basis_matrices realise the basis in the
    defining representation (adjoint representation for generic algebras)."""
    name: str
    structure_constants: np.ndarray
    inner_product: np.ndarray
    basis_matrices: np.ndarray = None
    kind: str = "generic"

    def __post_init__(self):
        c = np.asarray(self.structure_constants, dtype=float)
        g = np.asarray(self.inner_product, dtype=float)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise DimensionMismatchError(f"structure constants must be d x d x d, got {c.shape}")
        if g.shape != c.shape[:2]:
            raise DimensionMismatchError(f"inner product must be {c.shape[:2]}, got {g.shape}")
        if self.kind not in KINDS:
            raise ValueError(f"unknown algebra kind '{self.kind}'")
        object.__setattr__(self, "structure_constants", c)
        object.__setattr__(self, "inner_product", g)
        if self.basis_matrices is None:
            # ad(e_i)[k, j] = c[i, j, k]
            object.__setattr__(self, "basis_matrices", np.transpose(c, (0, 2, 1)).astype(complex))
        else:
            object.__setattr__(self, "basis_matrices", np.asarray(self.basis_matrices, dtype=complex))

    @property
    def dim(self):
        return self.structure_constants.shape[0]

    @property
    def rep_dim(self):
        return self.basis_matrices.shape[1]

    @cached_property
    def _flat_basis(self):
        return self.basis_matrices.reshape(self.dim, -1).T

    @cached_property
    def _flat_pinv(self):
        return np.linalg.pinv(self._flat_basis)

    def basis(self, i):
        e = np.zeros(self.dim)
        e[i] = 1.0
        return e


def _check_dim(alg, *elements):
    for x in elements:
        if np.shape(x)[-1:] != (alg.dim,):
            raise DimensionMismatchError(
                f"element of shape {np.shape(x)} does not belong to {alg.name} (dim {alg.dim})")


# ---------------------------------------------------------------------------
# Built-in algebras
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def su2():
    """su(2) with basis X_i = -i sigma_i / sqrt(2), orthonormal for -tr(XY)."""
    basis = -1j * PAULI / SQRT2
    return LieAlgebra("su2", SQRT2 * LEVI_CIVITA, np.eye(3), basis, kind="su2")


@lru_cache(maxsize=None)
def so3():
    """so(3) with basis (L_i)_{jk} = -eps_{ijk}, orthonormal for -tr(XY)/2."""
    basis = -LEVI_CIVITA.astype(complex)
    return LieAlgebra("so3", LEVI_CIVITA.copy(), np.eye(3), basis, kind="so3")


@lru_cache(maxsize=None)
def torus(n):
    if n < 1:
        raise ValueError("torus dimension must be >= 1")
    basis = np.zeros((n, n, n), dtype=complex)
    for k in range(n):
        basis[k, k, k] = 1j
    return LieAlgebra(f"t{n}", np.zeros((n, n, n)), np.eye(n), basis, kind="torus")


def get_algebra(name):
    """Resolves 'su2', 'so3' or 'tN' to a built-in algebra."""
    key = str(name).strip().lower()
    if key == "su2":
        return su2()
    if key == "so3":
        return so3()
    if key.startswith("t") and key[1:].isdigit():
        return torus(int(key[1:]))
    raise ValueError(f"unknown built-in algebra '{name}'")


def algebra_from_json(doc):
    """Builds a generic LieAlgebra from {"name", "dim", "structure_constants", "inner_product"}."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    dim = int(doc["dim"])
    c = np.asarray(doc["structure_constants"], dtype=float)
    g = np.asarray(doc.get("inner_product", np.eye(dim)), dtype=float)
    if c.shape != (dim, dim, dim):
        raise DimensionMismatchError(f"structure constants shape {c.shape} does not match dim {dim}")
    alg = LieAlgebra(doc.get("name", "custom"), c, g)
    logger.debug("loaded algebra %s (dim %d)", alg.name, dim)
    return alg


def algebra_to_json(alg):
    return {
        "name": alg.name,
        "dim": alg.dim,
        "structure_constants": alg.structure_constants.tolist(),
        "inner_product": alg.inner_product.tolist(),
    }


# ---------------------------------------------------------------------------
# Algebra arithmetic
# ---------------------------------------------------------------------------

def bracket(alg, X, Y):
    """[X, Y] by structure-constant contraction; C-bilinear on complex input."""
    _check_dim(alg, X, Y)
    return np.einsum("...i,...j,ijk->...k", X, Y, alg.structure_constants)


def inner(alg, X, Y):
    """Symmetric bilinear invariant product <X, Y> = X^T G Y."""
    _check_dim(alg, X, Y)
    return np.einsum("...i,ij,...j->...", X, alg.inner_product, Y)


def hermitian(alg, a, b):
    """Sesquilinear extension <a, b>_g = conj(a)^T G b to the complexification."""
    _check_dim(alg, a, b)
    return np.einsum("...i,ij,...j->...", np.conj(a), alg.inner_product, b)


def norm(alg, X):
    return float(np.sqrt(abs(hermitian(alg, X, X))))


def to_matrix(alg, X):
    """sum_i X_i E_i in the defining representation."""
    _check_dim(alg, X)
    return np.tensordot(X, alg.basis_matrices, axes=(-1, 0))


def from_matrix(alg, M, real=False):
    """Basis coefficients of a matrix in the span of the basis matrices."""
    coeffs = alg._flat_pinv @ np.asarray(M, dtype=complex).reshape(-1)
    return coeffs.real.copy() if real else coeffs


def ad_matrix(alg, X):
    """Matrix of ad_X acting on coefficient vectors: (ad_X)[k, j] = sum_i X_i c[i, j, k]."""
    _check_dim(alg, X)
    return np.einsum("i,ijk->kj", X, alg.structure_constants)


def random_element(alg, rng, scale=1.0):
    return scale * rng.standard_normal(alg.dim)


# ---------------------------------------------------------------------------
# Groups
# ---------------------------------------------------------------------------

def identity(alg):
    return np.eye(alg.rep_dim, dtype=complex)


def exp_matrix(alg, Z, check=False):
    """Matrix exponential of a (complex) algebra element.

    scipy's expm is scaling-and-squaring with a Pade approximant. With check
    set, exp(M) exp(-M) must reproduce the identity to EXP_TOL relative to
    the size of the two factors."""
    M = to_matrix(alg, np.asarray(Z, dtype=complex))
    g = scipy.linalg.expm(M)
    if not np.all(np.isfinite(g)):
        raise ConvergenceError(f"matrix exponential did not converge for |Z| = {norm(alg, Z):.3g}")
    if check:
        g_inv = scipy.linalg.expm(-M)
        scale = max(1.0, np.abs(g).max() * np.abs(g_inv).max())
        residual = np.abs(g @ g_inv - np.eye(alg.rep_dim)).max() / scale
        if residual > settings.EXP_TOL:
            raise ConvergenceError(f"matrix exponential inaccurate for |Z| = {norm(alg, Z):.3g}: "
                                   f"inverse residual {residual:.3g}")
    return g


def compact_residual(alg, k):
    """Distance of k from K: unitarity/orthogonality and unit determinant."""
    k = np.asarray(k, dtype=complex)
    eye = np.eye(k.shape[0])
    if alg.kind == "torus":
        off = k - np.diag(np.diag(k))
        return float(max(np.abs(off).max(initial=0.0), np.abs(np.abs(np.diag(k)) - 1.0).max()))
    if alg.kind == "generic":
        G = alg.inner_product
        return float(max(np.abs(k.imag).max(), np.abs(k.real.T @ G @ k.real - G).max()))
    res = np.abs(k.conj().T @ k - eye).max()
    if alg.kind == "so3":
        res = max(res, np.abs(k.imag).max())
    return float(max(res, abs(np.linalg.det(k) - 1.0)))


def complex_residual(alg, g):
    """Distance of g from G = K^C."""
    g = np.asarray(g, dtype=complex)
    if alg.kind == "torus":
        off = g - np.diag(np.diag(g))
        if np.min(np.abs(np.diag(g))) == 0.0:
            return np.inf
        return float(np.abs(off).max(initial=0.0))
    if alg.kind == "generic":
        return 0.0 if abs(np.linalg.det(g)) > 0 else np.inf
    res = abs(np.linalg.det(g) - 1.0)
    if alg.kind == "so3":
        res = max(res, np.abs(g.T @ g - np.eye(3)).max())
    return float(res)


def check_compact(alg, k, tol=settings.MEMBERSHIP_TOL):
    res = compact_residual(alg, k)
    if not res <= tol:
        raise GroupMembershipError(f"matrix is not in the compact group of {alg.name} (residual {res:.3g})")


def check_complex(alg, g, tol=settings.MEMBERSHIP_TOL):
    res = complex_residual(alg, g)
    if not res <= tol:
        raise GroupMembershipError(f"matrix is not in the complexified group of {alg.name} (residual {res:.3g})")


def project_to_compact(alg, k):
    """Nearest point of K: unitary polar factor, normalised determinant."""
    k = np.asarray(k, dtype=complex)
    if alg.kind == "torus":
        d = np.diag(k)
        return np.diag(d / np.abs(d))
    if alg.kind in ("so3", "generic"):
        u, _ = scipy.linalg.polar(k.real)
        return u.astype(complex)
    u, _ = scipy.linalg.polar(k)
    det = np.linalg.det(u)
    return u / det ** (1.0 / u.shape[0])


def kp_decompose(alg, g, tol=settings.MEMBERSHIP_TOL):
    """Factor g = k exp(iX) with k in K and X in k.

    The positive factor is the right polar factor p = (g* g)^(1/2); X is read
    off from log p = iX through the eigen-decomposition of p.
    """
    g = np.asarray(g, dtype=complex)
    check_complex(alg, g, tol)
    u, p = scipy.linalg.polar(g, side="right")
    w, V = np.linalg.eigh((p + p.conj().T) / 2)
    if np.min(w) <= 0.0:
        raise BranchCutError(f"positive polar factor has eigenvalue {np.min(w):.3g} <= 0")
    H = (V * np.log(w)) @ V.conj().T
    X = from_matrix(alg, -1j * H)
    if np.abs(X.imag).max() > np.sqrt(tol):
        raise BranchCutError("logarithm of the positive factor is not in i*k")
    if alg.kind in ("so3", "generic"):
        u = u.real.astype(complex)
    return u, X.real.copy()


def ad_action(alg, g, X, check=True):
    """Ad_g X = g X g^{-1}, re-expressed in the basis."""
    _check_dim(alg, X)
    if check:
        check_compact(alg, g)
    M = g @ to_matrix(alg, X) @ np.linalg.inv(g)
    return from_matrix(alg, M, real=np.isrealobj(X))


def random_compact(alg, rng, scale=1.0):
    return exp_matrix(alg, random_element(alg, rng, scale))


# ---------------------------------------------------------------------------
# Structural checks
# ---------------------------------------------------------------------------

def antisymmetry_residual(alg):
    c = alg.structure_constants
    return float(np.abs(c + np.transpose(c, (1, 0, 2))).max())


def jacobi_residual(alg):
    c = alg.structure_constants
    cc = np.einsum("ijm,mkl->ijkl", c, c)
    total = cc + np.transpose(cc, (1, 2, 0, 3)) + np.transpose(cc, (2, 0, 1, 3))
    return float(np.abs(total).max())


def ad_invariance_residual(alg, rng=None, samples=0):
    """max |<[Z,X],Y> + <X,[Z,Y]>| over basis triples and optional random triples."""
    d = alg.dim
    eye = np.eye(d)
    Z, X, Y = (np.repeat(eye, d * d, axis=0),
               np.tile(np.repeat(eye, d, axis=0), (d, 1)),
               np.tile(eye, (d * d, 1)))
    if rng is not None and samples:
        Z = np.vstack([Z, rng.standard_normal((samples, d))])
        X = np.vstack([X, rng.standard_normal((samples, d))])
        Y = np.vstack([Y, rng.standard_normal((samples, d))])
    res = inner(alg, bracket(alg, Z, X), Y) + inner(alg, X, bracket(alg, Z, Y))
    return float(np.abs(res).max())
