"""
Holomorphic curves through their pulled-back form eta = f* omega.

Polynomial coefficient arrays are in ascending powers of z with shape
(degree + 1, dim); complex numbers in JSON are [re, im] pairs.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath
import numpy as np
from numpy.polynomial import polynomial as P

import lie_kernel as lk
import settings
from dynamics import IntegratorConfig, complexified_action, omega_form, tangent_between
from errors import GeometryError, IntegratorError, PreconditionError, ScenarioError

logger = logging.getLogger(__name__)

CURVE_KINDS = ("polynomial", "scalar")
SURFACE_TYPES = ("disc", "annulus", "torus")


def parse_complex(value):
    if isinstance(value, (list, tuple)) and len(value) == 2 and not isinstance(value[0], (list, tuple)):
        return complex(value[0], value[1])
    if isinstance(value, (int, float, complex)):
        return complex(value)
    raise ScenarioError(f"cannot read complex number from {value!r}")


def parse_complex_array(values):
    if isinstance(values, (list, tuple)) and values and isinstance(values[0], (list, tuple)) \
            and values[0] and isinstance(values[0][0], (list, tuple)):
        return np.array([parse_complex_array(v) for v in values])
    return np.array([parse_complex(v) for v in values], dtype=complex)


def complex_to_json(values):
    arr = np.asarray(values, dtype=complex)
    if arr.ndim == 0:
        return [float(arr.real), float(arr.imag)]
    return [complex_to_json(v) for v in arr]


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CurveForm:
    """eta = mu(z) dz with mu polynomial (kind 'polynomial') or Z * h(z) (kind 'scalar')."""
    algebra: lk.LieAlgebra
    kind: str = "polynomial"
    coeffs: Optional[np.ndarray] = None
    Z: Optional[np.ndarray] = None
    zeta: Optional[np.ndarray] = None
    surface: dict = field(default_factory=lambda: {"type": "disc"})

    def __post_init__(self):
        if self.kind not in CURVE_KINDS:
            raise ScenarioError(f"curve kind must be one of {CURVE_KINDS}")
        d = self.algebra.dim
        if self.kind == "polynomial":
            c = np.atleast_2d(np.asarray(self.coeffs, dtype=complex))
            if c.shape[1] != d:
                raise ScenarioError(f"polynomial coefficients must have {d} components")
            object.__setattr__(self, "coeffs", c)
        else:
            Z = np.asarray(self.Z, dtype=complex)
            if Z.shape != (d,):
                raise ScenarioError(f"Z must have {d} components")
            object.__setattr__(self, "Z", Z)
            object.__setattr__(self, "zeta", np.atleast_1d(np.asarray(self.zeta, dtype=complex)))
        if self.surface.get("type", "disc") not in SURFACE_TYPES:
            raise ScenarioError(f"surface type must be one of {SURFACE_TYPES}")

    def polynomial(self):
        """Coefficients of mu, shape (degree + 1, dim)."""
        if self.kind == "polynomial":
            return self.coeffs
        return np.outer(self.zeta, self.Z)

    def mu(self, z):
        return P.polyval(z, self.polynomial())

    def __call__(self, z, u=1.0):
        """eta_z(u) for the real tangent vector u = a d_x + b d_y written as a + ib."""
        return self.mu(z) * u

    def sampler(self):
        return lambda z, u: self(z, u)

    @classmethod
    def from_json(cls, doc, algebra=None):
        try:
            alg = algebra or lk.get_algebra(doc.get("algebra", "su2"))
            kind = doc.get("kind", "polynomial")
            surface = doc.get("surface", {"type": "disc"})
            if kind == "polynomial":
                return cls(alg, "polynomial", coeffs=parse_complex_array(doc["coeffs"]), surface=surface)
            return cls(alg, "scalar", Z=parse_complex_array(doc["Z"]),
                       zeta=parse_complex_array(doc["zeta"]), surface=surface)
        except (KeyError, ValueError) as e:
            raise ScenarioError(f"invalid curve form: {e}")

    def to_json(self):
        doc = {"kind": self.kind, "algebra": self.algebra.name, "surface": self.surface}
        if self.kind == "polynomial":
            doc["coeffs"] = complex_to_json(self.coeffs)
        else:
            doc["Z"] = complex_to_json(self.Z)
            doc["zeta"] = complex_to_json(self.zeta)
        return doc


@dataclass(frozen=True)
class PeriodData:
    periods: tuple = ()


def torus_periods(c, tau):
    """Periods of c dz on C/(Z + tau Z) over the two lattice generators."""
    c = complex(c)
    return PeriodData((c, c * complex(tau)))


@dataclass(frozen=True, eq=False)
class StabilizerGroup:
    """Gamma = <generators> inside G, searched up to closure_depth letters."""
    generators: tuple = ()
    closure_depth: int = settings.LATTICE_CLOSURE_DEPTH
    tolerance: float = 1e-8
    algebra: Optional[lk.LieAlgebra] = None

    def __post_init__(self):
        gens = tuple(np.asarray(g, dtype=complex) for g in self.generators)
        if self.algebra is not None:
            for g in gens:
                lk.check_complex(self.algebra, g)
        object.__setattr__(self, "generators", gens)

    @property
    def rep_dim(self):
        if self.generators:
            return self.generators[0].shape[0]
        return None if self.algebra is None else self.algebra.rep_dim

    def _letters(self):
        letters = []
        for i, g in enumerate(self.generators):
            letters.append((f"g{i + 1}", g))
            letters.append((f"g{i + 1}^-1", np.linalg.inv(g)))
        return letters

    def _close(self, a, b):
        return np.abs(a - b).max() <= self.tolerance * max(1.0, np.abs(b).max())

    def find_word(self, target):
        """Breadth-first search over words in the generators.

        Returns ("true", word), ("false", None) when the group closed without
        meeting target, or ("undecided", None) when the depth ran out."""
        target = np.asarray(target, dtype=complex)
        eye = np.eye(target.shape[0], dtype=complex)
        if self._close(target, eye):
            return "true", "1"
        seen = [eye]
        frontier = [("", eye)]
        letters = self._letters()
        for _ in range(self.closure_depth):
            fresh = []
            for word, m in frontier:
                for name, g in letters:
                    cand = m @ g
                    if any(self._close(cand, s) for s in seen):
                        continue
                    w = f"{word}*{name}" if word else name
                    if self._close(cand, target):
                        return "true", w
                    seen.append(cand)
                    fresh.append((w, cand))
            if not fresh:
                return "false", None
            frontier = fresh
        return "undecided", None

    def contains(self, target):
        return self.find_word(target)[0] == "true"

    def to_json(self):
        return {"generators": [complex_to_json(g) for g in self.generators],
                "closure_depth": self.closure_depth, "tolerance": self.tolerance}

    @classmethod
    def from_json(cls, doc, algebra=None):
        if doc is None:
            return cls((), algebra=algebra)
        if isinstance(doc, list):
            doc = {"generators": doc}
        gens = [parse_complex_array(g) for g in doc.get("generators", [])]
        return cls(tuple(gens), int(doc.get("closure_depth", settings.LATTICE_CLOSURE_DEPTH)),
                   float(doc.get("tolerance", 1e-8)), algebra)


# ---------------------------------------------------------------------------
# Development and reconstruction
# ---------------------------------------------------------------------------

def segment_path(a, b, pieces=1):
    return [complex(a) + (complex(b) - complex(a)) * j / pieces for j in range(pieces + 1)]


def develop(chart, p0, eta, path, cfg=None):
    """g(1) for gdot = g eta(taudot), g(0) = 1, along a polyline in C.

    Only the algebra is taken from the chart; p0 is accepted so that develop
    and reconstruct_f share a calling convention.
    """
    cfg = cfg or IntegratorConfig()
    alg = chart.algebra if chart is not None else eta.algebra
    coeffs = eta.polynomial()
    path = [complex(z) for z in path]
    g = lk.identity(alg)
    steps = cfg.steps_for(1.0)
    h = 1.0 / steps
    for a, b in zip(path[:-1], path[1:]):
        dz = b - a
        if dz == 0:
            continue

        def rhs(tau, m, a=a, dz=dz):
            return m @ lk.to_matrix(alg, P.polyval(a + tau * dz, coeffs) * dz)

        for i in range(steps):
            tau = i * h
            k1 = rhs(tau, g)
            k2 = rhs(tau + h / 2, g + h / 2 * k1)
            k3 = rhs(tau + h / 2, g + h / 2 * k2)
            k4 = rhs(tau + h, g + h * k3)
            g = g + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(g)) or np.abs(g).max() > settings.GROUP_NORM_BOUND:
            raise IntegratorError("development left the configured norm bound")
    return g


def scalar_integral(eta, path):
    """integral of zeta along the path (endpoint difference of an antiderivative)."""
    if eta.kind != "scalar":
        raise PreconditionError("closed form only exists for scalar-type eta")
    H = P.polyint(eta.zeta)
    return complex(P.polyval(complex(path[-1]), H) - P.polyval(complex(path[0]), H))


def develop_scalar(eta, path):
    """exp(Z * integral of zeta)"""
    return lk.exp_matrix(eta.algebra, eta.Z * scalar_integral(eta, path), check=True)


def reconstruct_f(chart, p0, eta, z, basepath, cfg=None):
    """f(z) = psi(p0, g(1)) along basepath from z0 to z."""
    if abs(complex(basepath[-1]) - complex(z)) > 1e-12:
        raise PreconditionError("basepath must end at z")
    return complexified_action(chart, p0, develop(chart, p0, eta, basepath, cfg), cfg)


def compare_routes(chart, p0, eta, path_a, path_b, gamma, cfg=None, lattice=None):
    """Develops eta along two routes and compares them modulo Gamma.

    The endpoints must agree, or differ by a lattice vector when the torus
    lattice (1, tau) is given. The point discrepancy is only computed when a
    chart and p0 are given and the action is defined for both elements.
    """
    za, zb = complex(path_a[-1]), complex(path_b[-1])
    if lattice is not None:
        w1, w2 = (complex(v) for v in lattice)
        m = np.linalg.solve([[w1.real, w2.real], [w1.imag, w2.imag]], [(za - zb).real, (za - zb).imag])
        if np.abs(m - np.round(m)).max() > 1e-9:
            raise PreconditionError("route endpoints are not congruent modulo the lattice")
    elif abs(za - zb) > 1e-12:
        raise PreconditionError("routes must end at the same point")
    ga = develop(chart, p0, eta, path_a, cfg)
    gb = develop(chart, p0, eta, path_b, cfg)
    loop = ga @ np.linalg.inv(gb)
    status, word = gamma.find_word(loop)
    report = {"g_a": ga, "g_b": gb, "loop": loop, "in_gamma": status, "word": word,
              "discrepancy": None}
    if chart is not None and p0 is not None:
        try:
            qa = complexified_action(chart, p0, ga, cfg)
            qb = complexified_action(chart, p0, gb, cfg)
            report["discrepancy"] = qa.distance(qb)
        except GeometryError as e:
            report["action_error"] = str(e)
    return report


# ---------------------------------------------------------------------------
# Lattice condition and factorisation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LatticeResult:
    status: str
    witnesses: tuple = ()
    failing_period: Optional[complex] = None

    def __bool__(self):
        return self.status == "true"


def lattice_condition(Z, periods, gamma, algebra=None):
    """Tests exp(Z w) in Gamma for every generating period w."""
    alg = algebra or gamma.algebra or lk.su2()
    Z = np.asarray(Z, dtype=complex)
    witnesses = []
    undecided = None
    for w in periods.periods:
        status, word = gamma.find_word(lk.exp_matrix(alg, Z * complex(w), check=True))
        if status == "false":
            return LatticeResult("false", tuple(witnesses), complex(w))
        if status == "undecided" and undecided is None:
            undecided = complex(w)
        witnesses.append({"period": complex(w), "word": word})
    if undecided is not None:
        return LatticeResult("undecided", tuple(witnesses), undecided)
    return LatticeResult("true", tuple(witnesses))


def rational_approximation(a, tol=settings.PERIOD_RELATION_TOL, maxcoeff=settings.PERIOD_RELATION_MAXCOEFF):
    """a as a Fraction if an integer relation p*a + q = 0 exists, else None."""
    if abs(a) < tol:
        return Fraction(0)
    rel = mpmath.pslq([mpmath.mpf(a), mpmath.mpf(1)], tol=tol, maxcoeff=maxcoeff, maxsteps=10000)
    if rel is None or rel[0] == 0:
        return None
    frac = Fraction(-rel[1], rel[0])
    return frac if abs(float(frac) - a) < 10 * tol * max(1.0, abs(a)) else None


def _integer_row_basis(rows):
    """Basis of the Z-span of integer vectors in Z^2 by gcd row reduction."""
    rows = [tuple(r) for r in rows if any(r)]
    basis = []
    for col in range(2):
        active = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            pivot = active[0]
            reduced = [pivot]
            for r in active[1:]:
                q = r[col] // pivot[col]
                r = (r[0] - q * pivot[0], r[1] - q * pivot[1])
                (reduced if r[col] != 0 else rest).append(r)
            active = reduced
        basis.extend(active)
        rows = [r for r in rest if any(r)]
    return basis


def gauss_reduce(b1, b2):
    """Lagrange-Gauss reduction of a lattice basis in C."""
    b1, b2 = complex(b1), complex(b2)
    if abs(b1) > abs(b2):
        b1, b2 = b2, b1
    while True:
        mu = round((b2 * b1.conjugate()).real / abs(b1) ** 2)
        b2 = b2 - mu * b1
        if abs(b2) >= abs(b1) - 1e-15:
            break
        b1, b2 = b2, b1
    if (b2 / b1).imag < 0:
        b2 = -b2
    return b1, b2


def period_rank(periods):
    """R-rank of the period set: 0, 1, 2, or None when numerically ambiguous."""
    if not periods:
        return 0
    M = np.array([[w.real, w.imag] for w in periods])
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0:
        return 0
    if len(s) < 2:
        return 1
    ratio = s[1] / s[0]
    if ratio < settings.RANK_ONE_RATIO:
        return 1
    if ratio > settings.RANK_TWO_RATIO:
        return 2
    return None


def scalar_factorization(Z, periods, gamma, algebra=None):
    """Classifies f for scalar-type eta = Z zeta by the closure of its period group.

    Returns a dict with kind 'constant', 'elliptic' (with a reduced basis),
    'rejected' or 'undecided'."""
    if not periods.periods:
        return {"kind": "constant", "reason": "no periods",
                "note": "trivial H1: f is constant or factors through C"}
    lattice = lattice_condition(Z, periods, gamma, algebra)
    if lattice.status != "true":
        return {"kind": "rejected", "reason": f"lattice condition {lattice.status}",
                "failing_period": lattice.failing_period}
    nonzero = [complex(w) for w in periods.periods if abs(complex(w)) > settings.PERIOD_RELATION_TOL]
    if not nonzero:
        return {"kind": "constant", "reason": "all periods vanish"}
    rank = period_rank(nonzero)
    if rank is None:
        return {"kind": "undecided", "reason": "numerically ambiguous R-rank"}
    if rank == 1:
        ratios = [w / nonzero[0] for w in nonzero[1:]]
        dense = any(rational_approximation(r.real) is None for r in ratios)
        return {"kind": "constant", "reason": "period group has R-rank 1",
                "closure": "dense" if dense else "discrete"}

    b1 = nonzero[0]
    b2 = max(nonzero[1:], key=lambda w: abs((w / b1).imag))
    frame = np.array([[b1.real, b2.real], [b1.imag, b2.imag]])
    coords = [np.linalg.solve(frame, [w.real, w.imag]) for w in nonzero]
    fracs = []
    for c in coords:
        pair = [rational_approximation(float(v)) for v in c]
        if any(f is None for f in pair):
            return {"kind": "constant", "reason": "period group is not discrete (dense closure)"}
        fracs.append(pair)
    denom = math.lcm(*(f.denominator for pair in fracs for f in pair))
    rows = [[int(f * denom) for f in pair] for pair in fracs]
    basis = _integer_row_basis(rows)
    w1, w2 = ((r[0] * b1 + r[1] * b2) / denom for r in basis)
    w1, w2 = gauss_reduce(w1, w2)
    return {"kind": "elliptic", "basis": (w1, w2), "tau": w2 / w1,
            "witnesses": lattice.witnesses}


# ---------------------------------------------------------------------------
# (1,0)-type, projectivisation, conformality, quadric
# ---------------------------------------------------------------------------

def type10_check(eta_sampler, z):
    """|eta(d_y) - i eta(d_x)|, zero iff the (0,1)-part of eta vanishes at z."""
    ex = np.asarray(eta_sampler(z, 1.0), dtype=complex)
    ey = np.asarray(eta_sampler(z, 1j), dtype=complex)
    return float(np.linalg.norm(ey - 1j * ex))


def pullback_sampler(chart, f, h=1e-5):
    """eta = f* omega for a map f: C -> P, by central differences."""
    def sampler(z, u):
        p = f(z)
        fwd = tangent_between(chart, p, f(z + h * u), h)
        bwd = tangent_between(chart, p, f(z - h * u), -h)
        return omega_form(chart, p, (fwd + bwd).scale(0.5))
    return sampler


def projectivize(eta, z, tol=1e-12):
    """Normalised homogeneous coordinates of [mu(z)], dividing out common zeros at z."""
    coeffs = np.array(eta.polynomial(), dtype=complex)
    scale = np.abs(coeffs).max()
    if scale == 0.0:
        raise PreconditionError("eta vanishes identically")
    z = complex(z)
    while True:
        value = P.polyval(z, coeffs)
        if np.abs(value).max() > tol * scale:
            break
        quotients = [P.polydiv(coeffs[:, i], [-z, 1.0])[0] for i in range(coeffs.shape[1])]
        width = max(len(q) for q in quotients)
        coeffs = np.array([np.pad(q, (0, width - len(q))) for q in quotients]).T
    v = value / np.linalg.norm(value)
    lead = np.argmax(np.abs(v))
    return v * (abs(v[lead]) / v[lead])


def conformality_residual(eta, z):
    """|Im <eta(d_x), conj(eta(d_x))>_g|"""
    e = np.asarray(eta(z, 1.0), dtype=complex)
    return float(abs(lk.hermitian(eta.algebra, e, np.conj(e)).imag))


def pullback_metric(eta, z):
    """2x2 matrix of <Im eta(u), Im eta(v)> for u, v in (d_x, d_y)."""
    alg = eta.algebra
    ims = [np.asarray(eta(z, u), dtype=complex).imag for u in (1.0, 1j)]
    return np.array([[lk.inner(alg, a, b) for b in ims] for a in ims])


def conformal_defect(eta, z):
    """max over unit u of |g(u, J0 u)| for the pulled-back metric."""
    g = pullback_metric(eta, z)
    return float(np.hypot((g[1, 1] - g[0, 0]) / 2, (g[0, 1] + g[1, 0]) / 2))


def quadric_residual(eta, basis=None):
    """Coefficients of sum_ij G_ij mu_i(z) mu_j(z) (ascending powers)."""
    coeffs = eta.polynomial()
    G = eta.algebra.inner_product if basis is None else np.asarray(basis, dtype=float)
    d = coeffs.shape[1]
    out = np.zeros(2 * coeffs.shape[0] - 1, dtype=complex)
    for i in range(d):
        for j in range(d):
            if G[i, j] != 0.0:
                term = G[i, j] * P.polymul(coeffs[:, i], coeffs[:, j])
                out[:len(term)] += term
    return out
