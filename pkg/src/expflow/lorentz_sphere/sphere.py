"""Conformal action of SO(1, d+1)_0 on the sphere S^d.

Signature eta = diag(1, -1, ..., -1).  The sphere sits in the light cone as
{(1, x) : |x| = 1} and g acts by rescaling g(1, x) back to first coordinate 1:

    g = [[a, b], [c, m]],   g.x = (c + m x) / (a + b.x),   J_g(x) = 1 / (a + b.x)

With this J the cocycle identity J_{gh}(x) = J_g(h.x) J_h(x) holds exactly,
and sigma_g f(x) = J_g(x) f(g.x) is a right action of the group on functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from expflow.errors import ComplexSpectrum, NonpositiveDenominator
from expflow.lorentz_sphere.expm import matrix_exp
from expflow.lorentz_sphere.jordan import TAU_J, JordanDecomposition, real_jordan

MEMBERSHIP_TOL = 1e-10
GROUP_TOL = 1e-10
UNIT_TOL = 1e-12


def eta(d: int) -> np.ndarray:
    return np.diag([1.0] + [-1.0] * (d + 1))


def lie_algebra_membership(x, d: int, tol: float = MEMBERSHIP_TOL) -> bool:
    """True iff x^T eta + eta x vanishes, i.e. x lies in so(1, d+1)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (d + 2, d + 2):
        raise ValueError(f"expected a {(d + 2)}x{(d + 2)} matrix")
    e = eta(d)
    return bool(np.linalg.norm(x.T @ e + e @ x) <= tol)


def boost_generator(d: int, i: int = 1) -> np.ndarray:
    """Symmetric coupling of the time axis with spatial axis i (1 <= i <= d+1)."""
    x = np.zeros((d + 2, d + 2))
    x[0, i] = x[i, 0] = 1.0
    return x


def rotation_generator(d: int, i: int = 1, j: int = 2) -> np.ndarray:
    """Rotation in the spatial (i, j) plane; exp(t x) turns e_i towards e_j."""
    if not (1 <= i <= d + 1 and 1 <= j <= d + 1 and i != j):
        raise ValueError("spatial indices must be distinct and in 1..d+1")
    x = np.zeros((d + 2, d + 2))
    x[j, i] = 1.0
    x[i, j] = -1.0
    return x


def null_rotation_generator(d: int) -> np.ndarray:
    """Boost plus rotation sharing an axis: nilpotent with x^2 != 0 and x^3 = 0."""
    if d < 1:
        raise ValueError("need d >= 1")
    return boost_generator(d, 1) + rotation_generator(d, 1, 2)


def random_algebra_element(rng: np.random.Generator, d: int, max_norm: float = 1.0) -> np.ndarray:
    """Random element of so(1, d+1) with Frobenius norm at most max_norm."""
    n = d + 2
    x = np.zeros((n, n))
    w = rng.standard_normal(d + 1)
    x[0, 1:] = w
    x[1:, 0] = w
    om = rng.standard_normal((d + 1, d + 1))
    x[1:, 1:] = om - om.T
    radius = max_norm * rng.uniform() ** (1.0 / (n * (n - 1) / 2))
    return x * (radius / np.linalg.norm(x))


@dataclass(frozen=True, eq=False)
class LorentzElement:
    """Element of SO(1, d+1)_0 stored as its (d+2)x(d+2) matrix."""

    g: np.ndarray

    def __post_init__(self):
        g = np.array(self.g, dtype=float)
        n = g.shape[0]
        if g.ndim != 2 or g.shape != (n, n) or n < 3:
            raise ValueError("expected a square matrix of size d+2 >= 3")
        e = eta(n - 2)
        scale = max(1.0, float(np.linalg.norm(g)) ** 2)
        if np.linalg.norm(g.T @ e @ g - e) > GROUP_TOL * scale:
            raise ValueError("matrix does not preserve the Minkowski form")
        if g[0, 0] <= 0:
            raise ValueError("a <= 0: element is not in the connected component")
        if abs(np.linalg.det(g) - 1) > 1e-8 * scale:
            raise ValueError("det g != 1")
        g.setflags(write=False)
        object.__setattr__(self, "g", g)

    @classmethod
    def exp(cls, x, t: float = 1.0) -> LorentzElement:
        return cls(matrix_exp(np.asarray(x, dtype=float), t))

    @classmethod
    def identity(cls, d: int) -> LorentzElement:
        return cls(np.eye(d + 2))

    @classmethod
    def random(cls, rng: np.random.Generator, d: int, max_norm: float = 1.0) -> LorentzElement:
        return cls.exp(random_algebra_element(rng, d, max_norm))

    @property
    def d(self) -> int:
        return self.g.shape[0] - 2

    @property
    def a(self) -> float:
        return float(self.g[0, 0])

    @property
    def b(self) -> np.ndarray:
        return self.g[0, 1:]

    @property
    def c(self) -> np.ndarray:
        return self.g[1:, 0]

    @property
    def m(self) -> np.ndarray:
        return self.g[1:, 1:]

    def __matmul__(self, other: LorentzElement) -> LorentzElement:
        return LorentzElement(self.g @ other.g)

    def inverse(self) -> LorentzElement:
        e = eta(self.d)
        return LorentzElement(e @ self.g.T @ e)


@dataclass(frozen=True, eq=False)
class SpherePoint:
    x: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        if x.ndim != 1 or abs(np.linalg.norm(x) - 1) > UNIT_TOL:
            raise ValueError("sphere points must be unit vectors")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)


def _points(x) -> tuple[np.ndarray, bool]:
    if isinstance(x, SpherePoint):
        return x.x[None, :], True
    arr = np.asarray(x, dtype=float)
    return (arr[None, :], True) if arr.ndim == 1 else (arr, False)


def _denominator(g: LorentzElement, pts: np.ndarray) -> np.ndarray:
    den = g.a + pts @ g.b
    if np.any(den <= 0):
        raise NonpositiveDenominator(f"a + b.x = {den.min():.3e} <= 0")
    return den


def conformal_act(g: LorentzElement, x):
    """g.x = (c + m x) / (a + b.x), renormalized to the unit sphere.

    Accepts a SpherePoint, a single vector, or an array of points (rows).
    """
    pts, single = _points(x)
    den = _denominator(g, pts)
    y = (g.c[None, :] + pts @ g.m.T) / den[:, None]
    y /= np.linalg.norm(y, axis=1, keepdims=True)
    if isinstance(x, SpherePoint):
        return SpherePoint(y[0])
    return y[0] if single else y


def conformal_factor(g: LorentzElement, x):
    """J_g(x) = 1 / (a + b.x) = 1 / ||g (1, x)|| in the first coordinate."""
    pts, single = _points(x)
    J = 1.0 / _denominator(g, pts)
    return float(J[0]) if single else J


def sigma_pullback(g: LorentzElement, f: Callable, points) -> np.ndarray:
    """x -> J_g(x) f(g.x) on the given points; f must accept an array of rows."""
    pts, _ = _points(points)
    return conformal_factor(g, pts) * np.asarray(f(conformal_act(g, pts)))


def sphere_points(n: int, d: int = 2) -> np.ndarray:
    """Deterministic quasi-uniform points on S^d.

    d = 1: equally spaced angles; d = 2: Fibonacci lattice; d >= 3: normalized
    Gaussian samples from a fixed seed.
    """
    if n < 1:
        raise ValueError("need at least one point")
    if d == 1:
        ang = 2 * np.pi * (np.arange(n) + 0.5) / n
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    if d == 2:
        i = np.arange(n) + 0.5
        z = 1 - 2 * i / n
        r = np.sqrt(1 - z * z)
        ang = np.pi * (1 + math.sqrt(5)) * i
        return np.stack([r * np.cos(ang), r * np.sin(ang), z], axis=1)
    pts = np.random.default_rng(0).standard_normal((n, d + 1))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def random_sphere_points(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    pts = rng.standard_normal((n, d + 1))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


@dataclass(frozen=True)
class GeneratorClass:
    case: str  # "Case1" (no elliptic part) or "Case2"
    decomposition: JordanDecomposition
    parts_in_algebra: bool


def classify_generator(x, d: int) -> GeneratorClass:
    """Case1 iff the elliptic part x_e vanishes (within tau_J ||x||)."""
    x = np.asarray(x, dtype=float)
    if not lie_algebra_membership(x, d):
        raise ValueError("x is not in so(1, d+1)")
    J = real_jordan(x)
    scale = max(float(np.linalg.norm(x, 2)), 1e-300)
    tol = max(MEMBERSHIP_TOL, TAU_J) * scale
    parts_ok = all(
        np.linalg.norm(p.T @ eta(d) + eta(d) @ p) <= tol for p in (J.A_n, J.A_h, J.A_e)
    )
    case = "Case1" if np.linalg.norm(J.A_e, 2) <= TAU_J * scale else "Case2"
    return GeneratorClass(case, J, bool(parts_ok))


def orbit_limit_predict(A, v) -> np.ndarray:
    """lim_{t -> oo} e^{tA} v / |e^{tA} v| for A with real spectrum.

    The limit is A_n^delta v0 normalized, where v0 is the component of v in the
    generalized eigenspace of the largest eigenvalue that v actually reaches and
    delta is the largest power with A_n^delta v0 != 0.
    """
    A = np.asarray(A, dtype=float)
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        raise ValueError("v must be nonzero")
    J = real_jordan(A)
    scale = max(J.scale, 1e-300)
    if np.linalg.norm(J.A_e, 2) > TAU_J * scale:
        raise ComplexSpectrum("A has non-real eigenvalues; the projective orbit need not converge")
    vn = v / np.linalg.norm(v)
    # clusters are sorted by decreasing real part
    for cl, P in zip(J.clusters, J.projectors):
        v0 = np.real(P @ vn)
        if np.linalg.norm(v0) > 1e-10 * max(1.0, float(np.linalg.norm(P, 2))):
            break
    else:
        raise ValueError("v has no component in any generalized eigenspace")
    w = v0
    level = 1e-10 * scale
    for _ in range(A.shape[0]):
        nxt = J.A_n @ w
        if np.linalg.norm(nxt) <= level * np.linalg.norm(w):
            break
        w = nxt
    return w / np.linalg.norm(w)


def orbit_limit_numeric(A, v, T: float, steps: int = 64) -> np.ndarray:
    """e^{TA} v / |e^{TA} v|, renormalizing after each of ``steps`` sub-steps."""
    if T <= 0:
        raise ValueError("T must be positive")
    E = matrix_exp(np.asarray(A, dtype=float), T / steps)
    w = np.asarray(v, dtype=float) / np.linalg.norm(v)
    for _ in range(steps):
        w = E @ w
        w /= np.linalg.norm(w)
    return w


def projective_act(M, v) -> np.ndarray:
    w = np.asarray(M) @ np.asarray(v, dtype=float)
    return w / np.linalg.norm(w)
