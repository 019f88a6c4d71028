"""Exponential map of E x| R for flow representations, and its singular witnesses.

exp(v, t) = (beta_t v, t) with beta_t = (1/t) int_0^t alpha_s ds and beta_0 = id.
The structural identity (alpha_t - 1)/t = D o beta_t is checked numerically
per representation.  Fourier-side quantities use the 2 pi convention of
``multiplier_calculus``: an eigenvalue lambda = i mu of D corresponds to
mu = 2 pi k.theta.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from expflow.diophantine import is_exact
from expflow.errors import ResonantMultiplier, WindowTooSmall
from expflow.line_circle_flows import (
    CircleField,
    GridFunction,
    _simpson_weights,
    beta_s_line,
    delta_s,
    integrate,
)
from expflow.multiplier_calculus import (
    LatticeSpectrum,
    apply_beta,
    beta_multipliers,
    derivation_multiplier,
    invert_alpha_chi,
    kernel_indices,
    translation_multiplier,
)

KINDS = ("torus", "line", "circle")


@dataclass(frozen=True)
class FlowDescriptor:
    kind: str
    theta: tuple = ()
    field: CircleField | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"flow kind must be one of {KINDS}")
        if self.kind == "torus":
            if not self.theta:
                raise ValueError("torus flow needs theta")
            object.__setattr__(self, "theta", tuple(self.theta))
        if self.kind == "circle" and self.field is None:
            raise ValueError("circle flow needs a CircleField")

    @property
    def repr_tag(self) -> str:
        return {"torus": "lattice", "line": "grid", "circle": "grid"}[self.kind]

    def check_payload(self, v):
        expected = LatticeSpectrum if self.kind == "torus" else GridFunction
        if not isinstance(v, expected):
            raise TypeError(f"{self.kind} flow acts on {expected.__name__} payloads")
        if self.kind == "torus" and v.d != len(self.theta):
            raise ValueError("payload dimension does not match theta")


@dataclass(frozen=True, eq=False)
class SemidirectElement:
    repr: str
    t: float
    payload: LatticeSpectrum | GridFunction

    def to_json(self) -> str:
        if self.repr == "lattice":
            body = json.loads(self.payload.to_json())
        else:
            p = self.payload
            body = {"a": p.a, "b": p.b, "h": p.h, "samples": p.samples.tolist(), "support_hint": p.support_hint}
        return json.dumps({"repr": self.repr, "t": float(self.t), "payload": body})

    @classmethod
    def from_json(cls, text: str) -> SemidirectElement:
        obj = json.loads(text)
        body = obj["payload"]
        if obj["repr"] == "lattice":
            payload = LatticeSpectrum.from_json(body)
        elif obj["repr"] == "grid":
            hint = tuple(body["support_hint"]) if body.get("support_hint") else None
            payload = GridFunction(body["a"], body["b"], body["h"], body["samples"], hint)
        else:
            raise ValueError(f"unknown representation tag {obj['repr']!r}")
        return cls(obj["repr"], obj["t"], payload)


def _circle_beta(v: GridFunction, t: float, Z: CircleField, substeps: int = 64) -> GridFunction:
    """(1/t) int_0^t v(gamma_phi(s)) ds at every grid angle phi, RK4 plus Simpson in s."""
    if v.func is None:
        raise ValueError("circle payloads need GridFunction.func to evaluate along trajectories")
    substeps += substeps % 2
    ds = t / substeps
    phi = v.x.copy()
    vals = [np.asarray(v.func(phi), dtype=float)]
    for _ in range(substeps):
        k1 = Z(phi)
        k2 = Z(phi + ds / 2 * k1)
        k3 = Z(phi + ds / 2 * k2)
        k4 = Z(phi + ds * k3)
        phi = phi + ds / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        vals.append(np.asarray(v.func(np.mod(phi, 2 * np.pi)), dtype=float))
    avg = _simpson_weights(substeps) @ np.stack(vals) / substeps
    return GridFunction(v.a, v.b, v.h, avg)


def exp_semidirect(v, t, flow: FlowDescriptor) -> SemidirectElement:
    """(v, t) -> (beta_t v, t)."""
    flow.check_payload(v)
    if t == 0:
        return SemidirectElement(flow.repr_tag, t, v)
    if flow.kind == "torus":
        out = apply_beta(v, t, flow.theta)
    elif flow.kind == "line":
        out = beta_s_line(v, t)
    else:
        out = _circle_beta(v, t, flow.field)
    return SemidirectElement(flow.repr_tag, t, out)


def relation_residual(v, t, flow: FlowDescriptor, v_prime: GridFunction | None = None) -> float:
    """Size of (alpha_t v - v)/t - D(beta_t v).

    Torus: sup over coefficients, with the translation, derivation and
    averaging multipliers computed independently.  Line: sup over the common
    grid of Delta_t v / t - beta_t(v'), using D beta_t = beta_t D and the
    supplied derivative samples ``v_prime``.
    """
    flow.check_payload(v)
    if t == 0:
        raise ValueError("the relation is stated for t != 0")
    if flow.kind == "torus":
        ks = v.indices
        trans = np.array([translation_multiplier(t, flow.theta, k) for k in ks.tolist()])
        deriv = np.array([derivation_multiplier(flow.theta, k) for k in ks.tolist()])
        beta = beta_multipliers(t, flow.theta, ks)
        lhs = (trans - 1) / float(t)
        return float(np.max(np.abs((lhs - deriv * beta) * v.flat), initial=0.0))
    if flow.kind == "line":
        if v_prime is None:
            raise ValueError("line residual needs the sampled derivative v_prime")
        lhs = delta_s(v, t)
        rhs = beta_s_line(v_prime, t)
        a, b = max(lhs.a, rhs.a), min(lhs.b, rhs.b)
        return float(np.max(np.abs(lhs.restrict(a, b).samples / t - rhs.restrict(a, b).samples)))
    raise ValueError("relation_residual supports torus and line flows")


def periodic_singular_times(T_period, m: int, n_max: int) -> list:
    """t_n = T / (n m), n = 1..n_max.

    Exact (int/Fraction) periods give Fractions; other reals give floats.
    """
    if m == 0 or int(m) != m:
        raise ValueError("m must be a nonzero integer")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if not T_period > 0:
        raise ValueError("the period must be positive")
    if is_exact(T_period):
        T = Fraction(T_period)
        return [T / (n * int(m)) for n in range(1, n_max + 1)]
    return [float(T_period) / (n * int(m)) for n in range(1, n_max + 1)]


def singular_time_kernel(t, T_period, K: int) -> list:
    """Kernel indices of beta_t on the circle flow with period T (theta = 1/T)."""
    theta = (1 / Fraction(T_period),) if is_exact(T_period) else (1.0 / float(T_period),)
    return kernel_indices(t, theta, K)


def singular_time_raises(t, T_period, K: int) -> tuple[int, ...] | None:
    """The resonant index reported by invert_alpha_chi at time t, or None."""
    theta = (1 / Fraction(T_period),) if is_exact(T_period) else (1.0 / float(T_period),)
    try:
        invert_alpha_chi(LatticeSpectrum.zeros(1, K), t, theta)
    except ResonantMultiplier as err:
        return err.k
    return None


def eigenvalue_noninjectivity_witness(lam: float, T: float) -> complex:
    """(e^{i lam T} - 1) / (i lam), evaluated as 2 sin(pi r) e^{i pi r} / lam.

    r is lam T / (2 pi) reduced to the nearest integer, so the value is
    exactly zero on the lattice T in (2 pi / lam) Z.  T = 0 returns 0 (the
    excluded degenerate case).
    """
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    if T == 0:
        return 0j
    x = lam * T / (2 * math.pi)
    r = x - round(x)
    return complex(2 * math.sin(math.pi * r) * complex(math.cos(math.pi * r), math.sin(math.pi * r)) / lam)


def fourier_functional(f: GridFunction, p: float) -> complex:
    """lambda_p(f) = int e^{i p x} f(x) dx by composite Simpson on f's grid."""
    phase = np.exp(1j * p * f.x)
    re = integrate(GridFunction(f.a, f.b, f.h, (phase.real * f.samples)))
    im = integrate(GridFunction(f.a, f.b, f.h, (phase.imag * f.samples)))
    return complex(re, im)


def eigenfunctional_witness(h: GridFunction, p: float) -> complex:
    """lambda_p(beta_1 h) for compactly supported h.

    beta_1 h is supported in [u - 1, v] when supp h is in [u, v]; the window of
    ``h`` must contain that interval.
    """
    if h.support_hint is None:
        raise WindowTooSmall("h needs a support_hint so the window can be checked")
    u, v = h.support_hint
    if h.a > u - 1 + 1e-9 * h.h or h.b < v - 1e-9 * h.h:
        raise WindowTooSmall(f"window [{h.a}, {h.b}] must contain [{u - 1}, {v}]")
    return fourier_functional(beta_s_line(h, 1.0), p)


def smooth_bump(center: float, width: float, amplitude: float = 1.0) -> Callable:
    """amplitude * exp(-1 / (1 - ((x - center)/width)^2)) inside the support, 0 outside."""

    def f(x):
        x = np.asarray(x, dtype=float)
        z = (x - center) / width
        out = np.zeros_like(x)
        m = np.abs(z) < 1
        out[m] = amplitude * np.exp(-1.0 / (1.0 - z[m] ** 2))
        return out

    return f


def smooth_bump_derivative(center: float, width: float, amplitude: float = 1.0) -> Callable:
    def f(x):
        x = np.asarray(x, dtype=float)
        z = (x - center) / width
        out = np.zeros_like(x)
        m = np.abs(z) < 1
        zm = z[m]
        out[m] = amplitude * np.exp(-1.0 / (1.0 - zm**2)) * (-2 * zm / (1 - zm**2) ** 2) / width
        return out

    return f
