"""Fourier-multiplier realization of averaging operators for linear torus flows.

Conventions: the flow is ``sigma_t(x) = x + t*theta`` on ``[0, 1)^d`` (i.e.
``z_j -> exp(2 pi i t theta_j) z_j``), ``alpha_t f = f o sigma_t`` and the
character ``e_k(x) = exp(2 pi i k.x)`` is an eigenvector with

    alpha_t e_k                 = exp(2 pi i t k.theta) e_k
    D e_k                       = 2 pi i (k.theta) e_k
    int_0^ell alpha_s ds e_k    = (exp(2 pi i ell k.theta) - 1) / (2 pi i k.theta) e_k

The last scalar is read as ``ell`` when ``k.theta = 0``.  The normalized
average ``beta_t = (1/t) int_0^t alpha_s ds`` uses the same scalar divided by
``t``.  With the ``exp(i t theta)`` parametrization instead, eigenvalues read
``i (m.theta)``; rescale theta by ``2 pi`` to convert.

Parameters may be exact (int/Fraction), in which case resonance
``ell k.theta in Z`` is decided exactly, mpf (reduced mod 1 at their own
precision), or floats.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from expflow.diophantine import canonical_indices, is_exact, is_mpf
from expflow.errors import ResonantMultiplier

RESONANCE_TOL = 1e-4
KERNEL_TOL = 1e-12


@lru_cache(maxsize=64)
def _band(d: int, K: int) -> np.ndarray:
    axis = np.arange(-K, K + 1, dtype=np.int64)
    ks = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    ks.setflags(write=False)
    return ks


def band_indices(d: int, K: int) -> np.ndarray:
    """All k with |k|_inf <= K, lexicographic (matches coefficient storage)."""
    return _band(d, K)


@dataclass(frozen=True, eq=False)
class LatticeSpectrum:
    """Fourier coefficients x_k, |k|_inf <= K, of a trigonometric polynomial on T^d.

    ``coefficients`` is a dense complex array of shape ``(2K+1,)*d`` with
    ``k`` stored at offset ``k + K``; it is frozen on construction.
    """

    d: int
    K: int
    coefficients: np.ndarray
    real_valued: bool = False

    def __post_init__(self):
        if self.d < 1 or self.K < 0:
            raise ValueError("need d >= 1 and K >= 0")
        c = np.array(self.coefficients, dtype=complex)
        if c.shape != (2 * self.K + 1,) * self.d:
            raise ValueError(f"coefficient array shape {c.shape} does not match d={self.d}, K={self.K}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def zeros(cls, d: int, K: int, real_valued: bool = True) -> LatticeSpectrum:
        return cls(d, K, np.zeros((2 * K + 1,) * d, dtype=complex), real_valued)

    @classmethod
    def delta(cls, k: Sequence[int], K: int | None = None) -> LatticeSpectrum:
        k = tuple(int(v) for v in k)
        K = max((abs(v) for v in k), default=0) if K is None else K
        if max(abs(v) for v in k) > K:
            raise ValueError(f"index {k} outside band K={K}")
        c = np.zeros((2 * K + 1,) * len(k), dtype=complex)
        c[tuple(v + K for v in k)] = 1.0
        return cls(len(k), K, c, real_valued=all(v == 0 for v in k))

    @classmethod
    def from_entries(cls, d: int, K: int, entries: dict, real_valued: bool = False) -> LatticeSpectrum:
        c = np.zeros((2 * K + 1,) * d, dtype=complex)
        for k, v in entries.items():
            if len(k) != d or max(abs(x) for x in k) > K:
                raise ValueError(f"index {k} outside band")
            c[tuple(x + K for x in k)] = v
        return cls(d, K, c, real_valued)

    @classmethod
    def random(cls, rng: np.random.Generator, d: int, K: int, real_valued: bool = True, decay: float = 1.0):
        """Gaussian coefficients damped by (1+|k|^2)^(-decay/2)."""
        shape = (2 * K + 1,) * d
        c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        ks = band_indices(d, K)
        c *= ((1.0 + (ks**2).sum(axis=1)) ** (-decay / 2)).reshape(shape)
        if real_valued:
            c = 0.5 * (c + np.conj(c[(slice(None, None, -1),) * d]))
        return cls(d, K, c, real_valued)

    def with_coefficients(self, c: np.ndarray) -> LatticeSpectrum:
        return LatticeSpectrum(self.d, self.K, np.reshape(c, self.coefficients.shape), self.real_valued)

    @property
    def indices(self) -> np.ndarray:
        return band_indices(self.d, self.K)

    @property
    def flat(self) -> np.ndarray:
        return self.coefficients.reshape(-1)

    def coefficient(self, k: Sequence[int]) -> complex:
        if max(abs(v) for v in k) > self.K:
            return 0j
        return complex(self.coefficients[tuple(v + self.K for v in k)])

    def conjugate_symmetry_defect(self) -> float:
        c = self.coefficients
        return float(np.max(np.abs(c - np.conj(c[(slice(None, None, -1),) * self.d]))))

    def evaluate(self, points) -> np.ndarray:
        """Sum of x_k exp(2 pi i k.x) at points of shape (P, d)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        axis = np.arange(-self.K, self.K + 1)
        t = self.coefficients
        for j in range(self.d):
            e = np.exp(2j * np.pi * np.outer(pts[:, j], axis))
            t = np.einsum("pa,a...->p...", e, t) if j == 0 else np.einsum("pa,pa...->p...", e, t)
        return t

    def to_json(self) -> str:
        entries = [
            [[int(v) for v in k], float(c.real), float(c.imag)]
            for k, c in zip(self.indices, self.flat)
            if c != 0
        ]
        return json.dumps({"d": self.d, "K": self.K, "real_valued": self.real_valued, "entries": entries})

    @classmethod
    def from_json(cls, text: str | dict) -> LatticeSpectrum:
        obj = json.loads(text) if isinstance(text, str) else text
        entries = {tuple(k): complex(re, im) for k, re, im in obj["entries"]}
        return cls.from_entries(obj["d"], obj["K"], entries, obj.get("real_valued", False))


@dataclass(frozen=True)
class TorusFlow:
    theta: tuple

    def __post_init__(self):
        object.__setattr__(self, "theta", tuple(self.theta))

    @property
    def d(self) -> int:
        return len(self.theta)

    @property
    def nontrivial(self) -> bool:
        return any(t != 0 for t in self.theta)


def _theta(theta) -> tuple:
    if isinstance(theta, TorusFlow):
        return theta.theta
    if np.isscalar(theta) or is_mpf(theta) or isinstance(theta, Fraction):
        return (theta,)
    return tuple(theta)


def _phases(ell, theta, ks: np.ndarray):
    """k.theta and the reduced phase r = ell k.theta - round(ell k.theta).

    Returns float arrays ``(u, r)`` plus a boolean array marking exact zeros
    of ``ell k.theta mod 1`` (only populated for exact inputs).
    """
    theta = _theta(theta)
    ks = np.atleast_2d(ks)
    if len(theta) != ks.shape[1]:
        raise ValueError(f"theta has {len(theta)} entries, indices have {ks.shape[1]}")
    n = len(ks)
    if is_exact(ell) and all(is_exact(t) for t in theta):
        ell_q = Fraction(ell)
        th = [Fraction(t) for t in theta]
        u = np.empty(n)
        r = np.empty(n)
        hit = np.zeros(n, dtype=bool)
        for i, k in enumerate(ks.tolist()):
            dot = sum(kj * tj for kj, tj in zip(k, th))
            x = ell_q * dot
            rem = x - round(x)
            u[i] = float(dot)
            r[i] = float(rem)
            hit[i] = rem == 0 and dot != 0
        return u, r, hit
    if is_mpf(ell) or any(is_mpf(t) for t in theta):
        ctx = next(v.context for v in (ell, *theta) if is_mpf(v))
        th = [ctx.mpf(t) if not isinstance(t, Fraction) else ctx.mpf(t.numerator) / t.denominator for t in theta]
        ell_m = ctx.mpf(ell) if not isinstance(ell, Fraction) else ctx.mpf(ell.numerator) / ell.denominator
        u = np.empty(n)
        r = np.empty(n)
        for i, k in enumerate(ks.tolist()):
            dot = ctx.fsum(kj * tj for kj, tj in zip(k, th))
            x = ell_m * dot
            u[i] = float(dot)
            r[i] = float(x - ctx.nint(x))
        return u, r, np.zeros(n, dtype=bool)
    th = np.array([float(t) for t in theta])
    u = ks @ th
    x = float(ell) * u
    return u, x - np.rint(x), np.zeros(n, dtype=bool)


def _series(ell: float, u: np.ndarray) -> np.ndarray:
    # ell * sum_j (2 pi i ell u)^j / (j+1)!
    z = 2j * np.pi * ell * u
    term = np.ones_like(z)
    total = term.copy()
    for j in range(1, 200):
        term = term * z / (j + 1)
        total += term
        if np.all(np.abs(term) <= 1e-18 * np.abs(total)):
            break
    return ell * total


def _multipliers_from_phases(ell: float, u: np.ndarray, r: np.ndarray, hit: np.ndarray) -> np.ndarray:
    out = np.empty(len(u), dtype=complex)
    small = np.abs(u) < RESONANCE_TOL
    big = ~small
    # exp(2 pi i r) - 1 = 2i sin(pi r) exp(i pi r): no cancellation near resonance
    out[big] = np.sin(np.pi * r[big]) * np.exp(1j * np.pi * r[big]) / (np.pi * u[big])
    if small.any():
        out[small] = _series(ell, u[small])
    out[hit] = 0.0
    return out


def multipliers(ell, theta, ks: np.ndarray) -> np.ndarray:
    """Vectorized ``multiplier`` over the rows of ``ks``."""
    if not ell > 0:
        raise ValueError("ell must be positive")
    u, r, hit = _phases(ell, theta, np.asarray(ks, dtype=np.int64))
    return _multipliers_from_phases(float(ell), u, r, hit)


def multiplier(ell, theta, k: Sequence[int]) -> complex:
    """Scalar of the unnormalized average over [0, ell] on the character e_k."""
    return complex(multipliers(ell, theta, np.array([list(k)]))[0])


def beta_multipliers(t, theta, ks: np.ndarray) -> np.ndarray:
    """Normalized average (1/t) int_0^t alpha_s ds; identity at t = 0."""
    if t == 0:
        return np.ones(len(np.atleast_2d(ks)), dtype=complex)
    if t < 0:
        # (1/t) int_0^t alpha_s ds is the conjugate-side average over [t, 0]
        return np.conj(beta_multipliers(-t, theta, ks))
    ks = np.asarray(ks, dtype=np.int64)
    u, r, hit = _phases(t, theta, ks)
    # small t u: the normalized series avoids overflow of m / t for tiny t
    x = float(t) * u
    small = (np.abs(x) < RESONANCE_TOL) & ~hit
    out = np.zeros(len(u), dtype=complex)
    big = ~small
    out[big] = _multipliers_from_phases(float(t), u[big], r[big], hit[big]) / float(t)
    if small.any():
        out[small] = _series(1.0, x[small])
    return out


def derivation_multiplier(theta, k: Sequence[int]) -> complex:
    u, _, _ = _phases(1, theta, np.array([list(k)]))
    return complex(2j * np.pi * u[0])


def translation_multiplier(t, theta, k: Sequence[int]) -> complex:
    if t == 0:
        return 1 + 0j
    u, r, hit = _phases(t, theta, np.array([list(k)]))
    if hit[0]:
        return 1 + 0j
    return complex(np.exp(2j * np.pi * r[0]))


def apply_alpha_chi(spec: LatticeSpectrum, ell, theta) -> LatticeSpectrum:
    """Apply int_0^ell alpha_s ds coefficientwise."""
    m = multipliers(ell, theta, spec.indices)
    return spec.with_coefficients(spec.flat * m)


def apply_beta(spec: LatticeSpectrum, t, theta) -> LatticeSpectrum:
    """Apply beta_t = (1/t) int_0^t alpha_s ds (identity at t = 0)."""
    m = beta_multipliers(t, theta, spec.indices)
    return spec.with_coefficients(spec.flat * m)


def _canonical(k: Sequence[int]) -> tuple[int, ...]:
    k = tuple(int(v) for v in k)
    lead = next((v for v in k if v != 0), 0)
    return tuple(-v for v in k) if lead < 0 else k


def _order_key(k: Sequence[int]):
    return (max((abs(v) for v in k), default=0), tuple(k))


def invert_alpha_chi(spec: LatticeSpectrum, ell, theta, tol: float = KERNEL_TOL) -> LatticeSpectrum:
    """Coefficientwise inverse 2 pi i k.theta / (exp(2 pi i ell k.theta) - 1).

    Raises ResonantMultiplier if any band index has |multiplier| <= tol.
    """
    ks = spec.indices
    m = multipliers(ell, theta, ks)
    bad = np.flatnonzero(np.abs(m) <= tol)
    if bad.size:
        offenders = sorted({_canonical(ks[i]) for i in bad}, key=_order_key)
        first = offenders[0]
        value = abs(multiplier(ell, theta, first))
        raise ResonantMultiplier(first, value, sorted((tuple(int(v) for v in ks[i]) for i in bad), key=_order_key))
    return spec.with_coefficients(spec.flat / m)


def sobolev_norm(spec: LatticeSpectrum, N: int) -> float:
    if N < 0:
        raise ValueError("N must be nonnegative")
    w = (1.0 + (spec.indices.astype(float) ** 2).sum(axis=1)) ** N
    return float(np.sqrt(np.sum(w * np.abs(spec.flat) ** 2)))


def kernel_indices(ell, theta, K: int, tol: float = KERNEL_TOL) -> list[tuple[int, ...]]:
    """Nonzero band indices with vanishing multiplier.

    Sorted by sup-norm then lexicographically.  Exact inputs are decided by
    testing ell k.theta in Z exactly.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    theta = _theta(theta)
    ks = band_indices(len(theta), K)
    nz = np.any(ks != 0, axis=1)
    ks = ks[nz]
    u, r, hit = _phases(ell, theta, ks)
    if is_exact(ell) and all(is_exact(t) for t in theta):
        mask = hit
    else:
        mask = np.abs(_multipliers_from_phases(float(ell), u, r, hit)) <= tol
    found = [tuple(int(v) for v in k) for k in ks[mask]]
    return sorted(found, key=_order_key)


def embedding_defect_search(ell, theta, N: int, K: int) -> tuple[tuple[int, ...], float] | None:
    """First band index (sup-norm, then lexicographic, k ~ -k identified)
    with |m_k| * 2**N * (1 + |k|^2)**(N/2) < 1.

    Such a k gives ||alpha delta_k||_N < 2**-N while ||delta_k||_0 = 1.
    """
    if N < 1 or K < 1:
        raise ValueError("need N >= 1 and K >= 1")
    theta = _theta(theta)
    ks = canonical_indices(len(theta), K)
    m = np.abs(multipliers(ell, theta, ks))
    weight = (1.0 + (ks.astype(float) ** 2).sum(axis=1)) ** (N / 2)
    defect = m * 2.0**N * weight
    hits = np.flatnonzero(defect < 1)
    if not hits.size:
        return None
    i = hits[0]
    return tuple(int(v) for v in ks[i]), float(defect[i])


def condition_number(ell, theta, K: int) -> float:
    """max|m| / min|m| of the averaging operator restricted to the band."""
    theta = _theta(theta)
    m = np.abs(multipliers(ell, theta, band_indices(len(theta), K)))
    lo = m.min()
    return math.inf if lo == 0 else float(m.max() / lo)


def weighted_inverse_condition(ell, theta, N: int, K: int) -> float:
    """max over the band of ||delta_k||_0 / ||alpha delta_k||_N.

    Staying below 2**N on every band is the finite shadow of the operator
    being a topological embedding in the smooth category.
    """
    theta = _theta(theta)
    ks = band_indices(len(theta), K)
    m = np.abs(multipliers(ell, theta, ks))
    weight = (1.0 + (ks.astype(float) ** 2).sum(axis=1)) ** (N / 2)
    prod = m * weight
    return math.inf if prod.min() == 0 else float(np.max(1.0 / prod))


def ck_inverse_growth(theta, ell, r: int, ks: Iterable[Sequence[int]], tol: float = KERNEL_TOL):
    """||inverse(delta_k)||_r / ||delta_k||_r for each k, in input order."""
    theta = _theta(theta)
    out = []
    for k in ks:
        k = tuple(int(v) for v in k)
        m = multiplier(ell, theta, k)
        if abs(m) <= tol:
            raise ResonantMultiplier(_canonical(k), abs(m))
        delta = LatticeSpectrum.delta(k, max(1, max(abs(v) for v in k)))
        inv = delta.with_coefficients(delta.flat / m)
        out.append((k, sobolev_norm(inv, r) / sobolev_norm(delta, r)))
    return out


@dataclass
class MultiplierReport:
    ell: float
    kernel_indices: list
    min_abs_multiplier: float
    argmin: tuple
    defect_witnesses: list = field(default_factory=list)  # (N, k, defect)
    condition: float = math.inf

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "kernel_indices": [list(k) for k in self.kernel_indices],
            "min_abs_multiplier": self.min_abs_multiplier,
            "argmin": list(self.argmin),
            "defect_witnesses": [[n, list(k), v] for n, k, v in self.defect_witnesses],
            "condition": self.condition,
        }


def multiplier_report(ell, theta, K: int, n_max: int = 3, tol: float = KERNEL_TOL) -> MultiplierReport:
    theta = _theta(theta)
    ks = canonical_indices(len(theta), K)
    m = np.abs(multipliers(ell, theta, ks))
    i = int(np.argmin(m))
    witnesses = []
    for N in range(1, n_max + 1):
        hit = embedding_defect_search(ell, theta, N, K)
        if hit is not None:
            witnesses.append((N, hit[0], hit[1]))
    return MultiplierReport(
        ell=float(ell),
        kernel_indices=kernel_indices(ell, theta, K, tol),
        min_abs_multiplier=float(m[i]),
        argmin=tuple(int(v) for v in ks[i]),
        defect_witnesses=witnesses,
        condition=condition_number(ell, theta, K),
    )
