"""Difference and averaging operators of the translation flow on the line,
their explicit preimages, and flows of vector fields on the circle.

All line operators work on uniform grids.  Shifts are whole multiples of the
spacing by default, which keeps telescoping identities exact in floating
point; ``mode="cubic"`` allows arbitrary shifts through 4-point Lagrange
interpolation at an extra O(h^4) cost.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from expflow.errors import (
    DomainUnderflow,
    MissingSupportHint,
    NonmultipleShift,
    StepRejection,
    WindowTooSmall,
)

GRID_TOL = 1e-9


def _steps(s: float, h: float, what: str = "shift") -> int:
    j = s / h
    r = round(j)
    if abs(j - r) > GRID_TOL * max(1.0, abs(j)):
        raise NonmultipleShift(f"{what} {s} is not an integer multiple of h={h}")
    return int(r)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a real function at a, a+h, ..., b.

    ``support_hint = (u, v)`` promises the function vanishes outside [u, v];
    samples there must be exactly zero.  ``func`` optionally carries the
    analytic callable the samples came from (needed by ``gauss7``).
    """

    a: float
    b: float
    h: float
    samples: np.ndarray
    support_hint: tuple[float, float] | None = None
    func: Callable | None = field(default=None, repr=False)

    def __post_init__(self):
        if not (self.b > self.a and self.h > 0):
            raise ValueError("need a < b and h > 0")
        n = _steps(self.b - self.a, self.h, "window length")
        y = np.array(self.samples, dtype=float)
        if y.shape != (n + 1,):
            raise ValueError(f"expected {n + 1} samples, got {y.shape}")
        if not np.all(np.isfinite(y)):
            raise ValueError("samples must be finite")
        if self.support_hint is not None:
            u, v = self.support_hint
            if u > v:
                raise ValueError("support_hint must satisfy u <= v")
            outside = (self.x < u - GRID_TOL * self.h) | (self.x > v + GRID_TOL * self.h)
            if np.any(y[outside] != 0):
                raise ValueError("samples outside support_hint must be exactly zero")
            object.__setattr__(self, "support_hint", (float(u), float(v)))
        y.setflags(write=False)
        object.__setattr__(self, "samples", y)

    @classmethod
    def sample(cls, func: Callable, a: float, b: float, h: float, support_hint=None) -> GridFunction:
        n = _steps(b - a, h, "window length")
        x = a + h * np.arange(n + 1)
        y = np.asarray(func(x), dtype=float) * np.ones_like(x)
        if support_hint is not None:
            u, v = support_hint
            y = np.where((x >= u) & (x <= v), y, 0.0)
        return cls(a, b, h, y, support_hint, func)

    @property
    def n(self) -> int:
        return len(self.samples) - 1

    @cached_property
    def x(self) -> np.ndarray:
        return self.a + self.h * np.arange(len(self.samples))

    def with_samples(self, y, a=None, b=None, support_hint=None) -> GridFunction:
        return GridFunction(self.a if a is None else a, self.b if b is None else b, self.h, y, support_hint)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def restrict(self, a: float, b: float) -> GridFunction:
        i = _steps(a - self.a, self.h, "offset")
        j = _steps(b - self.a, self.h, "offset")
        if i < 0 or j > self.n or j <= i:
            raise DomainUnderflow(f"[{a}, {b}] is not inside [{self.a}, {self.b}]")
        return GridFunction(self.x[i], self.x[j], self.h, self.samples[i : j + 1], _clip_hint(self.support_hint, self.x[i], self.x[j]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "value"])
        for x, y in zip(self.x, self.samples):
            w.writerow([format(float(x), ".17g"), format(float(y), ".17g")])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, support_hint=None) -> GridFunction:
        rows = list(csv.reader(io.StringIO(text)))
        if rows[0] != ["x", "value"]:
            raise ValueError("expected header x,value")
        data = np.array(rows[1:], dtype=float)
        h = (data[-1, 0] - data[0, 0]) / (len(data) - 1)
        return cls(float(data[0, 0]), float(data[-1, 0]), float(h), data[:, 1], support_hint)


def _clip_hint(hint, a, b):
    if hint is None:
        return None
    u, v = max(hint[0], a), min(hint[1], b)
    return (u, v) if u <= v else (a, a)


def integrate(f: GridFunction) -> float:
    """Composite Simpson (3/8 tail for odd interval counts) over the window."""
    return float(f.h * np.dot(_simpson_weights(f.n), f.samples))


def _simpson_weights(m: int) -> np.ndarray:
    """Weights w with int over m intervals ~ h * sum w_i f_i."""
    if m < 1:
        raise ValueError("need at least one interval")
    if m == 1:
        return np.array([0.5, 0.5])
    w = np.zeros(m + 1)
    even = m if m % 2 == 0 else m - 3
    if even:
        w[: even + 1 : 2] += 2.0 / 3.0
        w[1:even:2] += 4.0 / 3.0
        w[0] -= 1.0 / 3.0
        w[even] -= 1.0 / 3.0
    if m % 2:
        w[even : even + 4] += np.array([3, 9, 9, 3]) / 8.0
    return w


def _shift_stack(f: GridFunction, shifts: Sequence[int]):
    """Rows f(x_i + j h) for each j, restricted to the common valid index range."""
    n = f.n
    lo_j, hi_j = min(0, min(shifts)), max(0, max(shifts))
    if f.support_hint is not None:
        lo, hi = 0, n
    else:
        lo, hi = -lo_j, n - hi_j
    if hi <= lo:
        raise DomainUnderflow(
            f"shifts up to {hi_j * f.h} leave no valid grid points in [{f.a}, {f.b}]; "
            "widen the window or give a support_hint"
        )
    padded = np.concatenate([np.zeros(-lo_j), f.samples, np.zeros(hi_j)])
    rows = np.stack([padded[lo + j - lo_j : hi + j - lo_j + 1] for j in shifts])
    return lo, hi, rows


def _lagrange4(f: GridFunction, xq: np.ndarray) -> np.ndarray:
    """Cubic interpolation of f at xq; NaN outside the window unless zero-extension applies."""
    if f.n < 3:
        raise DomainUnderflow("cubic interpolation needs at least 4 samples")
    t = (xq - f.a) / f.h
    p = np.clip(np.floor(t).astype(int) - 1, 0, f.n - 3)
    s = t - p
    y = f.samples
    w0 = -(s - 1) * (s - 2) * (s - 3) / 6
    w1 = s * (s - 2) * (s - 3) / 2
    w2 = -s * (s - 1) * (s - 3) / 2
    w3 = s * (s - 1) * (s - 2) / 6
    out = w0 * y[p] + w1 * y[p + 1] + w2 * y[p + 2] + w3 * y[p + 3]
    outside = (t < -GRID_TOL) | (t > f.n + GRID_TOL)
    out[outside] = 0.0 if f.support_hint is not None else np.nan
    return out


def _output(f: GridFunction, lo: int, hi: int, values: np.ndarray, reach: tuple[float, float], pad: float = 0.0) -> GridFunction:
    a, b = f.x[lo], f.x[hi]
    hint = None
    if f.support_hint is not None:
        u, v = f.support_hint
        # interpolation stencils reach up to two grid steps past the support
        hint = _clip_hint((u - reach[1] - pad, v - reach[0] + pad), a, b)
        values = np.where((f.x[lo : hi + 1] >= hint[0]) & (f.x[lo : hi + 1] <= hint[1]), values, 0.0)
    return GridFunction(a, b, f.h, values, hint)


def _cubic_rows(f: GridFunction, offsets: np.ndarray):
    xq = f.x[None, :] + offsets[:, None]
    vals = _lagrange4(f, xq.ravel()).reshape(xq.shape)
    ok = np.flatnonzero(~np.isnan(vals).any(axis=0))
    if ok.size < 2:
        raise DomainUnderflow("shift leaves no valid grid points; widen the window or give a support_hint")
    lo, hi = int(ok[0]), int(ok[-1])
    return lo, hi, vals[:, lo : hi + 1]


def delta_s(f: GridFunction, s: float, mode: str = "exact") -> GridFunction:
    """(Delta_s f)(x) = f(x + s) - f(x) on the grid points where it is defined."""
    if mode == "cubic":
        lo, hi, rows = _cubic_rows(f, np.array([s, 0.0]))
        return _output(f, lo, hi, rows[0] - rows[1], (min(s, 0), max(s, 0)), 2 * f.h)
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    j = _steps(s, f.h)
    lo, hi, rows = _shift_stack(f, [j, 0])
    return _output(f, lo, hi, rows[0] - rows[1], (min(s, 0), max(s, 0)))


_GL7 = np.polynomial.legendre.leggauss(7)


def beta_s_line(f: GridFunction, s: float, quad_order: str = "simpson", mode: str = "exact") -> GridFunction:
    """(beta_s f)(x) = int_0^1 f(x + s t) dt, with beta_0 = identity.

    ``simpson`` integrates over the grid nodes between x and x + s.
    ``gauss7`` uses composite 7-point Gauss-Legendre on the analytic ``f.func``
    with one panel per grid step.
    """
    if s == 0:
        return f
    reach = (min(s, 0), max(s, 0))
    if quad_order == "gauss7":
        if f.func is None:
            raise ValueError("gauss7 needs GridFunction.func (an analytic callable)")
        panels = max(1, math.ceil(abs(s) / f.h - GRID_TOL))
        nodes, weights = _GL7
        t = ((np.arange(panels)[:, None] + (nodes[None, :] + 1) / 2) / panels).ravel()
        w = np.tile(weights / 2, panels) / panels
        vals = np.asarray(f.func(f.x[None, :] + s * t[:, None]), dtype=float)
        if f.support_hint is not None:
            xs = f.x[None, :] + s * t[:, None]
            vals = np.where((xs >= f.support_hint[0]) & (xs <= f.support_hint[1]), vals, 0.0)
        return _output(f, 0, f.n, w @ vals, reach)
    if quad_order != "simpson":
        raise ValueError(f"unknown quad_order {quad_order!r}")
    if mode == "cubic":
        m = max(2, math.ceil(abs(s) / f.h - GRID_TOL))
        m += m % 2
        lo, hi, rows = _cubic_rows(f, s * np.arange(m + 1) / m)
        return _output(f, lo, hi, _simpson_weights(m) @ rows / m, reach, 2 * f.h)
    j = _steps(s, f.h)
    m = abs(j)
    step = 1 if j > 0 else -1
    lo, hi, rows = _shift_stack(f, [step * i for i in range(m + 1)])
    return _output(f, lo, hi, _simpson_weights(m) @ rows / m, reach)


def _require_hint(g: GridFunction):
    if g.support_hint is None:
        raise MissingSupportHint("operation needs a compactly supported input (set support_hint)")


def periodize(g: GridFunction, s: float) -> GridFunction:
    """sum_k g(x - k s) on one period, returned on the closed grid [0, s].

    The last sample repeats the first.  The window must be aligned with 0,
    i.e. a/h is an integer.
    """
    _require_hint(g)
    if s <= 0:
        raise ValueError("period must be positive")
    m = _steps(s, g.h, "period")
    if m < 2:
        raise ValueError("period must span at least two grid steps")
    offset = _steps(g.a, g.h, "window start")
    idx = (offset + np.arange(g.n + 1)) % m
    sums = np.bincount(idx, weights=g.samples, minlength=m)
    return GridFunction(0.0, s, g.h, np.append(sums, sums[0]))


def obstruction_per(g_prime: GridFunction, s: float) -> float:
    """sup |per_s(g')| with per_s(g')(x) = s * sum_k g'(x - k s)."""
    return float(s * periodize(g_prime, s).sup_norm())


def _preimage_window(g: GridFunction, s: float, window):
    _require_hint(g)
    if s <= 0:
        raise ValueError("s must be positive")
    a, b = window if window is not None else (g.a, g.b)
    j = _steps(s, g.h)
    i0 = _steps(a - g.a, g.h, "window offset")
    u, v = g.support_hint
    if a > u + GRID_TOL * g.h or b < v - GRID_TOL * g.h:
        raise WindowTooSmall(f"window [{a}, {b}] must contain the support [{u}, {v}]")
    n = _steps(b - a, g.h, "window length")
    # g resampled on the output window (zero outside its own window: compact support)
    src = np.arange(n + 1) + i0
    inside = (src >= 0) & (src <= g.n)
    y = np.zeros(n + 1)
    y[inside] = g.samples[src[inside]]
    copies = max(0, math.ceil((b - u) / s))
    return a, b, n, j, y, copies


def _tail_sum(y: np.ndarray, j: int, copies: int) -> np.ndarray:
    out = np.zeros_like(y)
    for k in range(1, copies + 1):
        shift = k * j
        if shift > len(y) - 1:
            break
        out[shift:] += y[: len(y) - shift]
    return out


def preimage_delta(g: GridFunction, s: float, window=None) -> GridFunction:
    """f(x) = sum_{k>=1} g(x - k s), so that f(x + s) - f(x) = g(x)."""
    a, b, n, j, y, copies = _preimage_window(g, s, window)
    return GridFunction(a, b, g.h, _tail_sum(y, j, copies))


def preimage_beta(g: GridFunction, g_prime: GridFunction, s: float, window=None) -> GridFunction:
    """h(x) = s * sum_{k>=1} g'(x - k s), so that beta_s h = g.

    ``g_prime`` is the analytically sampled derivative of ``g`` on the same grid.
    """
    if g_prime.support_hint is None:
        g_prime = GridFunction(g_prime.a, g_prime.b, g_prime.h, g_prime.samples, g.support_hint)
    a, b, n, j, y, copies = _preimage_window(g_prime, s, window)
    return GridFunction(a, b, g.h, s * _tail_sum(y, j, copies))


def tail_oscillation(f: GridFunction, T: float, side: int = 1) -> float:
    """max - min of f over t in [T, 2T] (side=+1) or [-2T, -T] (side=-1)."""
    lo, hi = (T, 2 * T) if side > 0 else (-2 * T, -T)
    mask = (f.x >= lo - GRID_TOL) & (f.x <= hi + GRID_TOL)
    if not mask.any():
        raise DomainUnderflow(f"no samples in [{lo}, {hi}]")
    y = f.samples[mask]
    return float(y.max() - y.min())


@dataclass(frozen=True)
class TrigPolynomial:
    """c0 + sum_n (cos_n cos(n phi) + sin_n sin(n phi)), n = 1..N."""

    cos: tuple[float, ...]
    sin: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "cos", tuple(float(c) for c in self.cos) or (0.0,))
        object.__setattr__(self, "sin", tuple(float(c) for c in self.sin))

    @property
    def degree(self) -> int:
        return max(len(self.cos) - 1, len(self.sin))

    def __call__(self, phi):
        phi = np.asarray(phi, dtype=float)
        out = np.full(phi.shape, self.cos[0])
        for n, c in enumerate(self.cos[1:], start=1):
            out = out + c * np.cos(n * phi)
        for n, c in enumerate(self.sin, start=1):
            out = out + c * np.sin(n * phi)
        return out


class CircleField(TrigPolynomial):
    """Vector field Z(phi) d/dphi on the circle; zeros found as unit-circle roots."""

    root_tol = 1e-10

    @cached_property
    def zero_set(self) -> tuple[tuple[float, int], ...]:
        N = self.degree
        cos = np.array(self.cos + (0.0,) * (N + 1 - len(self.cos)))
        sin = np.array(self.sin + (0.0,) * (N - len(self.sin)))
        if N == 0 or not np.any(np.abs(np.r_[cos[1:], sin]) > 0):
            if cos[0] == 0:
                raise ValueError("the zero field has every point as a zero")
            return ()
        # z^N Z(phi) with z = exp(i phi) is a polynomial of degree 2N
        c = np.zeros(2 * N + 1, dtype=complex)
        c[N] = cos[0]
        c[N + 1 :] = (cos[1:] - 1j * sin) / 2
        c[: N][::-1] = (cos[1:] + 1j * sin) / 2
        roots = np.roots(c[::-1])
        scale = float(np.sum(np.abs(c)))
        angles = np.mod(np.angle(roots[np.abs(np.abs(roots) - 1) < 1e-5]), 2 * np.pi)
        angles.sort()
        clusters: list[list[float]] = []
        for ang in angles:
            if clusters and _circ_dist(ang, clusters[-1][-1]) < 1e-5:
                clusters[-1].append(ang)
            else:
                clusters.append([ang])
        if len(clusters) > 1 and _circ_dist(clusters[0][0], clusters[-1][-1]) < 1e-5:
            clusters[0] = clusters.pop() + clusters[0]
        out = []
        for cl in clusters:
            phi = float(np.mod(np.angle(np.mean(np.exp(1j * np.array(cl)))), 2 * np.pi))
            if 2 * np.pi - phi < 1e-12:
                phi = 0.0
            if abs(float(self(phi))) <= self.root_tol * scale:
                out.append((phi, len(cl)))
        return tuple(sorted(out))


def _circ_dist(a: float, b: float) -> float:
    d = abs(a - b) % (2 * np.pi)
    return min(d, 2 * np.pi - d)


@dataclass(frozen=True, eq=False)
class FlowCurve:
    t_grid: np.ndarray
    values: np.ndarray
    initial_angle: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "phi"])
        for t, p in zip(self.t_grid, self.values):
            w.writerow([format(float(t), ".17g"), format(float(p), ".17g")])
        return buf.getvalue()


def _rk4(Z, y, dt):
    k1 = Z(y)
    k2 = Z(y + dt / 2 * k1)
    k3 = Z(y + dt / 2 * k2)
    k4 = Z(y + dt * k3)
    return y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _march(Z, y0, dt, steps, tol):
    out = np.empty(steps + 1)
    out[0] = y = y0
    for i in range(steps):
        full = _rk4(Z, y, dt)
        half = _rk4(Z, _rk4(Z, y, dt / 2), dt / 2)
        err = abs(full - half) / 15
        if err > tol:
            raise StepRejection(f"local error {err:.2e} > {tol:.0e} at step {i}; reduce dt")
        out[i + 1] = y = half + (half - full) / 15
    return out


def integrate_circle_flow(Z: CircleField, theta1: float, T: float, dt: float, tol: float = 1e-8) -> FlowCurve:
    """Classical RK4 for phi' = Z(phi) on t in [-T, T], started at phi(0) = theta1.

    Each step is compared against two half steps; a local error estimate
    above ``tol`` raises StepRejection.  Angles are returned in [0, 2 pi).
    """
    if dt <= 0 or T <= 0:
        raise ValueError("need T > 0 and dt > 0")
    steps = _steps(T, dt, "horizon")
    f = lambda p: float(Z(p))
    fwd = _march(f, float(theta1), dt, steps, tol)
    bwd = _march(f, float(theta1), -dt, steps, tol)
    phi = np.concatenate([bwd[:0:-1], fwd])
    t = dt * np.arange(-steps, steps + 1)
    return FlowCurve(t, np.mod(phi, 2 * np.pi), float(theta1))


def pullback_along_flow(f: Callable, curve: FlowCurve) -> GridFunction:
    """t -> f(gamma(t)) sampled on the curve's time grid."""
    h = float(curve.t_grid[1] - curve.t_grid[0])
    vals = np.asarray(f(curve.values), dtype=float) * np.ones_like(curve.values)
    return GridFunction(float(curve.t_grid[0]), float(curve.t_grid[-1]), h, vals)
