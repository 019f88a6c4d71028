"""Command-line experiments.

Every subcommand builds an ExperimentReport: an echo of the configuration,
its sha256 hash, and a list of checks with status pass / fail / report-only.
The process exits non-zero when any pass/fail check fails.  Reports are
byte-identical for identical configurations; wall time is only included
with ``--timing``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import click
import numpy as np

from expflow import diophantine as dio
from expflow import line_circle_flows as lcf
from expflow import multiplier_calculus as mc
from expflow import semidirect_exp as sx
from expflow.errors import ExpflowError, InvalidConfig, ResonantMultiplier
from expflow.lorentz_sphere import (
    LorentzElement,
    boost_generator,
    classify_generator,
    conformal_act,
    conformal_factor,
    matrix_exp,
    matrix_from_json,
    null_rotation_generator,
    orbit_limit_numeric,
    orbit_limit_predict,
    projective_act,
    random_sphere_points,
    real_jordan,
    rotation_generator,
    sphere_points,
)
from expflow.lorentz_sphere.jordan import TAU_J

SCHEMA = "expflow/1"


@dataclass
class Check:
    name: str
    status: str
    value: object
    tolerance: object = None

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "value": _jsonable(self.value), "tolerance": self.tolerance}


@dataclass
class ExperimentReport:
    command: str
    config: dict
    checks: list[Check] = field(default_factory=list)
    results: dict = field(default_factory=dict)
    series: list[tuple[float, float]] = field(default_factory=list)
    series_header: tuple[str, str] = ("x", "y")
    wall_time: float | None = None

    @property
    def config_hash(self) -> str:
        body = json.dumps({"command": self.command, "config": self.config}, sort_keys=True)
        return hashlib.sha256(body.encode()).hexdigest()

    def le(self, name: str, value: float, tol: float):
        """Pass when value <= tol (recomputed from the stored value)."""
        self.checks.append(Check(name, "pass" if value <= tol else "fail", float(value), tol))

    def ge(self, name: str, value: float, tol: float):
        self.checks.append(Check(name, "pass" if value >= tol else "fail", float(value), tol))

    def truth(self, name: str, ok: bool, value=None):
        self.checks.append(Check(name, "pass" if ok else "fail", value if value is not None else bool(ok)))

    def note(self, name: str, value):
        self.checks.append(Check(name, "report-only", value))

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def to_dict(self) -> dict:
        out = {
            "schema": SCHEMA,
            "command": self.command,
            "config": self.config,
            "config_hash": self.config_hash,
            "checks": [c.to_dict() for c in self.checks],
            "results": _jsonable(self.results),
            "passed": self.ok,
        }
        if self.wall_time is not None:
            out["wall_time_s"] = self.wall_time
        return out

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.to_dict(), indent=2) + "\n"
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "status", "value", "tolerance"])
        for c in self.checks:
            w.writerow([c.name, c.status, _csv_cell(c.value), _csv_cell(c.tolerance)])
        return buf.getvalue()

    def series_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.series_header)
        for x, y in self.series:
            w.writerow([repr(float(x)), repr(float(y))])
        return buf.getvalue()


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return json.dumps(_jsonable(v)) if isinstance(v, (list, tuple, dict)) else str(v)


def _real(text: str, bits: int):
    try:
        return dio.parse_real(text, bits)[0]
    except (ValueError, TypeError) as err:
        raise InvalidConfig(f"cannot parse real {text!r}") from err


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as err:
        raise InvalidConfig(f"expected comma-separated numbers, got {text!r}") from err


@click.group()
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for every randomized input.")
@click.option("-o", "--output", type=click.Path(dir_okay=False, writable=True), default="-", help="Report path ('-' for stdout).")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--plot-data", type=click.Path(dir_okay=False, writable=True), default=None, help="Write x,y plot pairs here.")
@click.option("--precision", type=int, default=dio.DEFAULT_PRECISION, show_default=True, help="Working precision in bits.")
@click.option("--timing", is_flag=True, help="Include wall time (makes output non-deterministic).")
@click.pass_context
def main(ctx, seed, output, fmt, plot_data, precision, timing):
    """Numeric witnesses for averaging operators, Diophantine data and Lorentz actions."""
    if not 0 <= seed < 2**64:
        raise click.BadParameter("seed must be a 64-bit unsigned integer", param_hint="--seed")
    if precision < 53:
        raise click.BadParameter("precision must be at least 53 bits", param_hint="--precision")
    ctx.obj = {"seed": seed, "output": output, "fmt": fmt, "plot": plot_data, "bits": precision, "timing": timing}


def _run(ctx, command: str, params: dict, body):
    """Build the report, write it, and exit with the check status."""
    obj = ctx.obj
    config = {**params, "seed": obj["seed"], "precision": obj["bits"]}
    report = ExperimentReport(command, config)
    rng = np.random.default_rng(np.random.SeedSequence(obj["seed"]))
    start = time.perf_counter()
    try:
        body(report, rng, obj["bits"])
    except (InvalidConfig, ValueError) as err:
        raise click.UsageError(str(err)) from err
    except ExpflowError as err:
        report.checks.append(Check("error", "fail", f"{type(err).__name__}: {err}"))
    if obj["timing"]:
        report.wall_time = time.perf_counter() - start
    text = report.render(obj["fmt"])
    try:
        if obj["output"] == "-":
            click.echo(text, nl=False)
        else:
            Path(obj["output"]).write_text(text)
        if obj["plot"] and report.series:
            Path(obj["plot"]).write_text(report.series_csv())
    except OSError as err:
        raise click.FileError(str(obj["output"]), hint=str(err)) from err
    ctx.exit(0 if report.ok else 1)


@main.command()
@click.argument("x")
@click.option("--terms", type=int, default=400, show_default=True)
@click.option("--threshold", type=float, default=dio.EVIDENCE_THRESHOLD, show_default=True)
@click.pass_context
def classify(ctx, x, terms, threshold):
    """Continued fraction and Liouville evidence for a real X (e.g. sqrt2, phi, 22/7, liouville:4)."""

    def body(rep, rng, bits):
        value = _real(x, bits)
        cf = dio.cf_expand(value, terms, bits, strict=False)
        r = dio.classify(value, terms, bits, threshold)
        rep.results = {"report": r.to_dict(), "terms_head": list(cf.terms[:20])}
        rep.note("classification", r.classification)
        rep.note("exponent_estimate", r.exponent_estimate)
        ctx_mp = dio._context(bits)
        v = ctx_mp.mpf(value.numerator) / value.denominator if isinstance(value, Fraction) else value
        worst = 0.0
        for p, q in cf.convergents[1:-1]:
            worst = max(worst, float(abs(v - ctx_mp.mpf(p) / q) * q * q))
        rep.le("convergent_bound_q2", worst, 1.0)
        if r.classification == "rational":
            rep.le("rational_reconstruction", float(abs(v - ctx_mp.mpf(r.p) / r.q)), 2.0 ** (-bits // 2))
        for _, q, err in r.witnesses:
            if q > 1 and err > 0:
                rep.series.append((math.log(q), -math.log(err)))
        rep.series_header = ("log_q", "minus_log_error")

    _run(ctx, "classify", {"x": x, "terms": terms, "threshold": threshold}, body)


@main.command()
@click.argument("theta", nargs=-1, required=True)
@click.option("--bound", type=int, default=10, show_default=True)
@click.option("--tol", type=float, default=1e-9, show_default=True)
@click.pass_context
def relation(ctx, theta, bound, tol):
    """Search 0 < |k|_inf <= bound for k.theta within tol of an integer."""

    def body(rep, rng, bits):
        vals = [_real(t, bits) for t in theta]
        rel = dio.integer_relation_search(vals, bound, tol)
        rep.results = {"relation": None if rel is None else {"k": list(rel.k), "target": rel.target, "residual": rel.residual}}
        rep.note("found", rel is not None)
        if rel is not None:
            exact = sum(k * dio._as_fraction(v) for k, v in zip(rel.k, vals)) - rel.target
            rep.le("residual_recomputed", abs(float(exact)), tol)

    _run(ctx, "relation", {"theta": list(theta), "bound": bound, "tol": tol}, body)


@main.command()
@click.argument("s")
@click.argument("n", type=int)
@click.pass_context
def discrepancy(ctx, s, n):
    """Star discrepancy of {k s mod 1}, k = 1..N, plus a doubling series."""

    def body(rep, rng, bits):
        if n < 1:
            raise InvalidConfig("N must be >= 1")
        value = _real(s, bits)
        d = dio.star_discrepancy(value, n)
        rep.results = {"discrepancy": d}
        rep.truth("in_unit_interval", 0 < d <= 1, d)
        m = 1
        while m <= n:
            rep.series.append((m, dio.star_discrepancy(value, m)))
            m *= 2
        rep.series_header = ("N", "discrepancy")

    _run(ctx, "discrepancy", {"s": s, "N": n}, body)


@main.command()
@click.option("--theta", "theta", multiple=True, required=True, help="Rotation vector entry (repeat per dimension).")
@click.option("--ell", default="1", show_default=True)
@click.option("-K", "K", type=int, default=16, show_default=True)
@click.option("--N", "N", type=int, default=3, show_default=True, help="Largest norm order for defect search.")
@click.option("--tol", type=float, default=mc.KERNEL_TOL, show_default=True)
@click.option("--ck-indices", default="", help="Comma-separated 1-d indices for inverse growth.")
@click.pass_context
def torus(ctx, theta, ell, K, N, tol, ck_indices):
    """Kernel, inversion round trip, embedding defects and inverse growth on a band."""

    def body(rep, rng, bits):
        th = tuple(_real(t, bits) for t in theta)
        ell_v = _real(ell, bits)
        if not ell_v > 0 or K < 1:
            raise InvalidConfig("need ell > 0 and K >= 1")
        d = len(th)
        report = mc.multiplier_report(ell_v, th, K, N, tol)
        rep.results = {"multiplier_report": report.to_dict()}
        for k in report.kernel_indices:
            m = abs(mc.multiplier(ell_v, th, k))
            if m > tol:
                rep.le(f"kernel_soundness{list(k)}", m, tol)
        spec = mc.LatticeSpectrum.random(rng, d, K)
        if report.kernel_indices:
            rep.note("kernel", [list(k) for k in report.kernel_indices])
            try:
                mc.invert_alpha_chi(spec, ell_v, th, tol)
                rep.truth("resonance_detected", False)
            except ResonantMultiplier as err:
                rep.truth("resonance_detected", True, list(err.k))
        else:
            rep.note("kernel", [])
            back = mc.invert_alpha_chi(mc.apply_alpha_chi(spec, ell_v, th), ell_v, th, tol)
            err = float(np.max(np.abs(back.flat - spec.flat)) / np.max(np.abs(spec.flat)))
            rep.le("roundtrip_relative", err, 1e-10)
        rep.note("condition_number", report.condition)
        for n_, k, v in report.defect_witnesses:
            rep.note(f"defect_N{n_}", {"k": list(k), "defect": v})
            rep.ge(f"condition_exceeds_2^{n_}", mc.condition_number(ell_v, th, max(abs(x) for x in k)), 2.0**n_)
        if ck_indices:
            ks = [(int(t),) for t in ck_indices.split(",")]
            if d != 1:
                raise InvalidConfig("--ck-indices is for one-dimensional theta")
            growth = mc.ck_inverse_growth(th, ell_v, 0, ks, tol)
            rep.results["ck_growth"] = [[k[0], r] for k, r in growth]
            rep.series = [(k[0], r) for k, r in growth]
            rep.series_header = ("k", "inverse_ratio")

    _run(ctx, "torus", {"theta": list(theta), "ell": ell, "K": K, "N": N, "tol": tol, "ck_indices": ck_indices}, body)


@main.command()
@click.option("--s", "s", type=float, default=1.0, show_default=True)
@click.option("--h", "h", type=float, default=1e-3, show_default=True)
@click.option("--bumps", type=int, default=5, show_default=True)
@click.pass_context
def line(ctx, s, h, bumps):
    """Delta_s / beta_s preimages of seeded bumps and the periodization obstruction."""

    def body(rep, rng, bits):
        if s <= 0 or h <= 0 or bumps < 1:
            raise InvalidConfig("need s > 0, h > 0 and at least one bump")
        worst_d = worst_b = 0.0
        obstructions = []
        for i in range(bumps):
            c = float(rng.uniform(0.3, 0.7))
            w = float(rng.uniform(0.15, 0.3))
            amp = float(rng.uniform(0.5, 2.0))
            a, b = -1.0, 9.0
            g = lcf.GridFunction.sample(sx.smooth_bump(c, w, amp), a, b, h, (c - w, c + w))
            gp = lcf.GridFunction.sample(sx.smooth_bump_derivative(c, w, amp), a, b, h, (c - w, c + w))
            f = lcf.preimage_delta(g, s)
            df = lcf.delta_s(f, s)
            worst_d = max(worst_d, float(np.max(np.abs(df.samples - g.restrict(df.a, df.b).samples))))
            H = lcf.preimage_beta(g, gp, s)
            bh = lcf.beta_s_line(H, s)
            worst_b = max(worst_b, float(np.max(np.abs(bh.samples - g.restrict(bh.a, bh.b).samples))))
            obstructions.append(lcf.obstruction_per(gp, s))
        rep.le("delta_preimage_roundtrip", worst_d, 1e-12)
        rep.le("beta_preimage_roundtrip", worst_b, 5e-6)
        F = lcf.GridFunction.sample(lambda x: 2 * np.pi * np.cos(2 * np.pi * x), -1.0, 9.0, h)
        rep.le("beta_kills_periodic_derivative", lcf.beta_s_line(F, 1.0).sup_norm(), 1e-10)
        rep.note("obstruction_per", obstructions)
        rep.results = {"obstructions": obstructions}

    _run(ctx, "line", {"s": s, "h": h, "bumps": bumps}, body)


@main.command()
@click.option("--field", "cos_coeffs", default="1,-1", show_default=True, help="Cosine coefficients c0,c1,... of Z.")
@click.option("--sin", "sin_coeffs", default="", help="Sine coefficients s1,s2,... of Z.")
@click.option("--theta1", type=float, default=math.pi, show_default=True)
@click.option("--T", "T", type=float, default=80.0, show_default=True)
@click.option("--dt", type=float, default=0.01, show_default=True)
@click.pass_context
def circle(ctx, cos_coeffs, sin_coeffs, theta1, T, dt):
    """Flow of Z(phi) d/dphi, the pullback of cos, and tail-limit evidence."""

    def body(rep, rng, bits):
        Z = lcf.CircleField(tuple(_floats(cos_coeffs)), tuple(_floats(sin_coeffs)))
        zeros = Z.zero_set
        rep.results = {"zeros": [[p, m] for p, m in zeros]}
        for p, m in zeros:
            rep.le(f"zero_residual@{p:.6f}", abs(float(Z(p))), 1e-10 * (1 + sum(map(abs, Z.cos + Z.sin))))
        curve = lcf.integrate_circle_flow(Z, theta1, T, dt)
        pb = lcf.pullback_along_flow(np.cos, curve)
        osc = []
        T0 = T / 8
        while 2 * T0 <= T + 1e-9:
            osc.append((T0, lcf.tail_oscillation(pb, T0), lcf.tail_oscillation(pb, T0, -1)))
            T0 *= 2
        rep.results["tail_oscillation"] = [list(o) for o in osc]
        if zeros:
            rep.truth("tail_oscillation_decreasing", all(b[1] < a[1] and b[2] < a[2] for a, b in zip(osc, osc[1:])))
        rep.note("limit_plus", float(pb.samples[-1]))
        rep.note("limit_minus", float(pb.samples[0]))
        stride = max(1, len(curve.t_grid) // 2000)
        rep.series = list(zip(curve.t_grid[::stride].tolist(), curve.values[::stride].tolist()))
        rep.series_header = ("t", "phi")

    _run(ctx, "circle", {"field": cos_coeffs, "sin": sin_coeffs, "theta1": theta1, "T": T, "dt": dt}, body)


@main.command()
@click.argument("matrix", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def jordan(ctx, matrix):
    """Real Jordan decomposition of a matrix given as JSON {n, rows}."""

    def body(rep, rng, bits):
        try:
            A = matrix_from_json(Path(matrix).read_text())
        except (KeyError, json.JSONDecodeError) as err:
            raise InvalidConfig(f"bad matrix file: {err}") from err
        J = real_jordan(A)
        rep.results = {"decomposition": J.to_dict()}
        for name, v in J.residuals().items():
            rep.le(name, v, TAU_J)
        n = A.shape[0]
        S = rng.standard_normal((n, n)) + 3 * np.eye(n)
        Si = np.linalg.inv(S)
        J2 = real_jordan(S @ A @ Si)
        scale = max(np.linalg.norm(S @ A @ Si, 2), 1e-300)
        eq = max(np.linalg.norm(S @ X @ Si - Y, 2) for X, Y in ((J.A_n, J2.A_n), (J.A_h, J2.A_h), (J.A_e, J2.A_e)))
        rep.le("conjugation_equivariance", eq / scale, 1e-6)

    _run(ctx, "jordan", {"matrix": Path(matrix).read_text()}, body)


@main.command()
@click.option("-d", "d", type=int, default=2, show_default=True)
@click.option("--pairs", type=int, default=200, show_default=True)
@click.option("--orbits", type=int, default=20, show_default=True)
@click.pass_context
def sphere(ctx, d, pairs, orbits):
    """Cocycle, group action, orbit limits and generator classes on S^d."""

    def body(rep, rng, bits):
        if d < 1:
            raise InvalidConfig("d must be >= 1")
        worst_j = worst_a = 0.0
        for _ in range(pairs):
            g1, g2 = LorentzElement.random(rng, d), LorentzElement.random(rng, d)
            x = random_sphere_points(rng, 1, d)[0]
            worst_j = max(worst_j, abs(conformal_factor(g1 @ g2, x) - conformal_factor(g1, conformal_act(g2, x)) * conformal_factor(g2, x)))
            worst_a = max(worst_a, float(np.linalg.norm(conformal_act(g1 @ g2, x) - conformal_act(g1, conformal_act(g2, x)))))
        rep.le("cocycle", worst_j, 1e-10)
        rep.le("group_action", worst_a, 1e-10)
        worst_o = worst_f = 0.0
        for A, v in _real_spectrum_cases(rng, orbits):
            lim = orbit_limit_predict(A, v)
            num = orbit_limit_numeric(A, v, 50.0)
            worst_o = max(worst_o, float(np.linalg.norm(lim - num)))
            worst_f = max(worst_f, float(np.linalg.norm(projective_act(matrix_exp(A), lim) - lim)))
        rep.le("orbit_limit_agreement", worst_o, 1e-6)
        rep.le("orbit_limit_fixed_point", worst_f, 1e-8)
        cases = {}
        for name, x, expected in (
            ("boost", boost_generator(d), "Case1"),
            ("rotation", rotation_generator(d), "Case2"),
            ("null_rotation", null_rotation_generator(d), "Case1"),
        ):
            gc = classify_generator(x, d)
            cases[name] = gc.case
            rep.truth(f"classify_{name}", gc.case == expected and gc.parts_in_algebra, gc.case)
        rep.results = {"generator_cases": cases}

    _run(ctx, "sphere", {"d": d, "pairs": pairs, "orbits": orbits}, body)


def _real_spectrum_cases(rng, count):
    """Diagonalizable matrices with well separated real spectra and random start vectors."""
    out = []
    while len(out) < count:
        n = int(rng.integers(2, 5))
        vals = np.sort(rng.uniform(-2, 2, n))
        if n > 1 and np.min(np.diff(vals)) < 0.5:
            continue
        S = rng.standard_normal((n, n)) + 2 * np.eye(n)
        if np.linalg.cond(S) > 100:
            continue
        A = S @ np.diag(vals) @ np.linalg.inv(S)
        v = rng.standard_normal(n)
        out.append((A, v / np.linalg.norm(v)))
    return out


@main.command()
@click.option("--flow", type=click.Choice(["torus", "line"]), default="torus", show_default=True)
@click.option("--theta", "theta", multiple=True, default=("phi",), show_default=True)
@click.option("--t", "t", default="0.5", show_default=True)
@click.option("-K", "K", type=int, default=8, show_default=True)
@click.option("--h", "h", type=float, default=1e-3, show_default=True)
@click.pass_context
def expmap(ctx, flow, theta, t, K, h):
    """exp(v, t) = (beta_t v, t) on a seeded payload, with the relation residual."""

    def body(rep, rng, bits):
        t_v = _real(t, bits)
        if flow == "torus":
            fd = sx.FlowDescriptor("torus", tuple(_real(x, bits) for x in theta))
            v = mc.LatticeSpectrum.random(rng, len(fd.theta), K)
            el = sx.exp_semidirect(v, t_v, fd)
            if t_v != 0:
                rep.le("relation_residual", sx.relation_residual(v, t_v, fd), 1e-10)
        else:
            tf = float(t_v)
            fd = sx.FlowDescriptor("line")
            c, w = float(rng.uniform(-1, 1)), float(rng.uniform(0.5, 1.5))
            v = lcf.GridFunction.sample(lambda x: np.exp(-((x - c) / w) ** 2), -8.0, 8.0, h)
            vp = lcf.GridFunction.sample(lambda x: -2 * (x - c) / w**2 * np.exp(-((x - c) / w) ** 2), -8.0, 8.0, h)
            el = sx.exp_semidirect(v, tf, fd)
            if tf != 0:
                rep.le("relation_residual", sx.relation_residual(v, tf, fd, vp), 1e-6)
        rep.truth("second_component_is_t", el.t == t_v)
        rep.results = {"element": json.loads(el.to_json())}

    _run(ctx, "expmap", {"flow": flow, "theta": list(theta), "t": t, "K": K, "h": h}, body)


@main.command("singular-times")
@click.option("--T", "T", default="1", show_default=True, help="Period of the flow.")
@click.option("--m", "m", type=int, default=1, show_default=True)
@click.option("--n-max", type=int, default=5, show_default=True)
@click.pass_context
def singular_times(ctx, T, m, n_max):
    """Schedule t_n = T/(n m) and the resonance each one triggers."""

    def body(rep, rng, bits):
        Tv = _real(T, bits)
        Tv = Tv if isinstance(Tv, Fraction) else float(Tv)
        times = sx.periodic_singular_times(Tv, m, n_max)
        rep.results = {"times": times}
        for n, t in enumerate(times, start=1):
            k = sx.singular_time_raises(abs(t), Tv, n * abs(m))
            rep.truth(f"t{n}_resonant", k == (n * abs(m),), None if k is None else list(k))

    _run(ctx, "singular-times", {"T": T, "m": m, "n_max": n_max}, body)


def bms_chain(d: int, samples: int = 500, n_max: int = 5) -> ExperimentReport:
    """Rotation generator: J == 1, imaginary eigenvalue along the orbit, singular times."""
    rep = ExperimentReport("bms-witness", {"d": d, "samples": samples, "n_max": n_max})
    x = rotation_generator(d, 1, 2)
    gc = classify_generator(x, d)
    rep.truth("rotation_is_case2", gc.case == "Case2", gc.case)
    pts = sphere_points(samples, d)
    ts = np.linspace(0.0, 2 * np.pi, 65)
    worst_j = 0.0
    for t in ts:
        worst_j = max(worst_j, float(np.max(np.abs(conformal_factor(LorentzElement.exp(x, t), pts) - 1))))
    rep.le("conformal_factor_is_one", worst_j, 1e-12)
    # the character z = x1 + i x2 is an eigenfunction: f(exp(tx).p) = e^{i t} f(p)
    lam = 1.0
    f = lambda q: q[:, 0] + 1j * q[:, 1]
    worst_p = 0.0
    ring = 0.0
    for t in ts:
        g = LorentzElement.exp(x, t)
        moved = conformal_act(g, pts)
        worst_p = max(worst_p, float(np.max(np.abs(conformal_factor(g, pts) * f(moved) - np.exp(1j * lam * t) * f(pts)))))
        ring = max(ring, float(np.max(np.abs(np.hypot(moved[:, 0], moved[:, 1]) - np.hypot(pts[:, 0], pts[:, 1])))))
    rep.le("eigen_phase", worst_p, 1e-8)
    rep.le("orbit_on_circle", ring, 1e-8)
    T = 2 * np.pi / lam
    times = sx.periodic_singular_times(T, 1, n_max)
    for n, t in enumerate(times, start=1):
        k = sx.singular_time_raises(t, T, n)
        rep.truth(f"singular_time_{n}_resonant", k == (n,), None if k is None else list(k))
    rep.results = {"lambda": lam, "period": T, "singular_times": times}
    return rep


@main.command("bms-witness")
@click.option("-d", "d", type=int, default=2, show_default=True)
@click.option("--samples", type=int, default=500, show_default=True)
@click.option("--n-max", type=int, default=5, show_default=True)
@click.pass_context
def bms_witness(ctx, d, samples, n_max):
    """Witness chain for the supertranslation group on S^d."""

    def body(rep, rng, bits):
        if d < 1 or samples < 1 or n_max < 1:
            raise InvalidConfig("need d >= 1, samples >= 1 and n_max >= 1")
        chain = bms_chain(d, samples, n_max)
        rep.checks.extend(chain.checks)
        rep.results = chain.results

    _run(ctx, "bms-witness", {"d": d, "samples": samples, "n_max": n_max}, body)


if __name__ == "__main__":
    sys.exit(main())
