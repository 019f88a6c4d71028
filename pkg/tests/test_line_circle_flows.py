import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expflow.errors import DomainUnderflow, MissingSupportHint, NonmultipleShift, StepRejection, WindowTooSmall
from expflow.line_circle_flows import (
    CircleField,
    GridFunction,
    TrigPolynomial,
    beta_s_line,
    delta_s,
    integrate,
    integrate_circle_flow,
    obstruction_per,
    periodize,
    preimage_beta,
    preimage_delta,
    pullback_along_flow,
    tail_oscillation,
)
from expflow.semidirect_exp import smooth_bump, smooth_bump_derivative

H = 1e-3


def bump_pair(center=0.5, width=0.5, amp=1.0, a=-1.0, b=9.0, h=H):
    hint = (center - width, center + width)
    g = GridFunction.sample(smooth_bump(center, width, amp), a, b, h, hint)
    gp = GridFunction.sample(smooth_bump_derivative(center, width, amp), a, b, h, hint)
    return g, gp


def common(f1, f2):
    a, b = max(f1.a, f2.a), min(f1.b, f2.b)
    return f1.restrict(a, b).samples, f2.restrict(a, b).samples


def test_delta_zero_shift():
    f = GridFunction.sample(np.sin, 0, 2, 0.01)
    assert delta_s(f, 0).sup_norm() == 0


def test_delta_ramp_constant_h():
    f = GridFunction.sample(lambda x: x, 0, 10, 0.01)
    out = delta_s(f, 0.01)
    assert np.allclose(out.samples, 0.01, atol=1e-14)


def test_delta_periodic_sin():
    f = GridFunction.sample(lambda x: np.sin(2 * np.pi * x), 0, 4, H)
    assert delta_s(f, 1).sup_norm() <= 1e-12


def test_beta_constant():
    f = GridFunction.sample(lambda x: 3.5 + 0 * x, 0, 5, 0.01)
    assert np.allclose(beta_s_line(f, 2).samples, 3.5, atol=1e-13)


@pytest.mark.parametrize("quad", ["simpson", "gauss7"])
def test_beta_of_periodic_derivative_vanishes(quad):
    f = GridFunction.sample(lambda x: 2 * np.pi * np.cos(2 * np.pi * x), 0, 4, H)
    assert beta_s_line(f, 1, quad_order=quad).sup_norm() <= 1e-9


def test_beta_ramp():
    f = GridFunction.sample(lambda x: x, 0, 10, 0.01)
    out = beta_s_line(f, 2)
    assert np.allclose(out.samples, out.x + 1, atol=1e-12)


def test_beta_nonmean_zero_periodic_is_mean():
    f = GridFunction.sample(lambda x: 0.7 + np.sin(2 * np.pi * x) ** 2, 0, 4, H)
    assert np.allclose(beta_s_line(f, 1).samples, 1.2, atol=1e-10)


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("coeffs", [(1, -2, 0.5), (0, 0, 0, 0.3, -0.1), (2, 1, -1, 0.25, 0.05, -0.01)])
def test_beta_delta_identity_polynomials(s, coeffs):
    F = np.polynomial.Polynomial(coeffs)
    for h in (0.02, 0.01):
        Fg = GridFunction.sample(F, -1, 4, h)
        Fp = GridFunction.sample(F.deriv(), -1, 4, h)
        lhs, rhs = common(beta_s_line(Fp, s), delta_s(Fg, s))
        assert np.max(np.abs(lhs - rhs / s)) <= 50 * h**4


def test_simpson_fourth_order_on_oscillation():
    errs = []
    for h in (0.02, 0.01):
        f = GridFunction.sample(lambda x: np.cos(3 * x), 0, 3, h)
        exact = (np.sin(3 * (f.x + 1)) - np.sin(3 * f.x)) / 3
        out = beta_s_line(f, 1)
        errs.append(np.max(np.abs(out.samples - exact[: out.n + 1])))
    assert errs[1] < errs[0] / 12


def test_gauss7_requires_callable():
    f = GridFunction(0, 1, 0.1, np.zeros(11))
    with pytest.raises(ValueError):
        beta_s_line(f, 0.5, quad_order="gauss7")


def test_domain_underflow_and_nonmultiple():
    f = GridFunction.sample(np.sin, 0, 1, 0.1)
    with pytest.raises(DomainUnderflow):
        delta_s(f, 2)
    with pytest.raises(NonmultipleShift):
        delta_s(f, 0.15)


def test_support_hint_allows_zero_extension():
    g, _ = bump_pair(a=-1, b=2)
    out = delta_s(g, 5)
    assert out.a == g.a and out.b == g.b
    assert np.allclose(out.samples, -g.samples)


def test_cubic_mode_nonmultiple_shift():
    f = GridFunction.sample(np.sin, 0, 3, 0.01)
    out = delta_s(f, 0.015, mode="cubic")
    assert np.max(np.abs(out.samples - (np.sin(out.x + 0.015) - np.sin(out.x)))) <= 1e-9


def test_support_hint_validation():
    with pytest.raises(ValueError):
        GridFunction(0, 1, 0.5, [1.0, 0.0, 1.0], (0.4, 0.6))
    with pytest.raises(NonmultipleShift):
        GridFunction(0, 1, 0.3, [0.0] * 4)


def test_periodize_single_summand():
    g, _ = bump_pair(center=0.5, width=0.4, a=0, b=1, h=0.01)
    p = periodize(g, 1)
    assert np.allclose(p.samples[:-1], g.samples[:-1], atol=0)


def test_periodize_integral():
    g, _ = bump_pair(center=1.3, width=0.9, a=-2, b=4)
    assert integrate(periodize(g, 0.5)) == pytest.approx(integrate(g), abs=1e-12)


def test_periodize_telescoping():
    f = smooth_bump(0.5, 0.5)
    g = GridFunction.sample(lambda x: f(x) - f(x - 2), -1, 5, H, (0, 3))
    assert periodize(g, 2).sup_norm() <= 1e-15


def test_periodize_requires_hint():
    with pytest.raises(MissingSupportHint):
        periodize(GridFunction.sample(np.sin, 0, 1, 0.01), 0.5)


def test_obstruction_examples():
    _, gp = bump_pair(center=0.5, width=0.3, a=0, b=2)
    assert obstruction_per(gp, 1) > 1e-3
    f = smooth_bump_derivative(0.5, 0.3)
    pair = GridFunction.sample(lambda x: f(x) - f(x - 1), 0, 3, H, (0, 2))
    assert obstruction_per(pair, 1) <= 1e-12
    zero = GridFunction(0, 1, 0.01, np.zeros(101), (0, 1))
    assert obstruction_per(zero, 0.5) == 0


def test_preimage_of_zero():
    g = GridFunction(-1, 9, 0.01, np.zeros(1001), (0, 1))
    assert preimage_delta(g, 2).sup_norm() == 0
    assert preimage_beta(g, g, 2).sup_norm() == 0


BUMPS = [(0.5, 0.5, 1.0), (0.3, 0.2, -2.0), (0.6, 0.35, 0.7), (0.1, 0.9, 1.5), (0.8, 0.15, 3.0)]


@pytest.mark.parametrize("s", [1, 2])
@pytest.mark.parametrize("center, width, amp", BUMPS)
def test_preimage_round_trips(center, width, amp, s):
    g, gp = bump_pair(center, width, amp)
    f = preimage_delta(g, s)
    lhs, rhs = common(delta_s(f, s), g)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12
    h = preimage_beta(g, gp, s)
    lhs, rhs = common(beta_s_line(h, s), g)
    assert np.max(np.abs(lhs - rhs)) <= 5e-6


def test_preimage_window_too_small():
    g, _ = bump_pair(center=0.5, width=0.5, a=-1, b=9)
    with pytest.raises(WindowTooSmall):
        preimage_delta(g, 2, window=(0.5, 9))
    with pytest.raises(MissingSupportHint):
        preimage_delta(GridFunction.sample(np.sin, 0, 1, 0.01), 0.5)


def test_csv_round_trip():
    g, _ = bump_pair(h=0.01)
    text = g.to_csv()
    assert text.splitlines()[0] == "x,value"
    back = GridFunction.from_csv(text, g.support_hint)
    assert np.array_equal(back.samples, g.samples)
    assert back.a == g.a and back.n == g.n


@settings(max_examples=25, deadline=None)
@given(st.floats(-1, 1), st.floats(0.1, 0.9), st.floats(-3, 3), st.sampled_from([0.5, 1.0, 1.5]))
def test_preimage_delta_property(center, width, amp, s):
    g, _ = bump_pair(round(center, 2), width, amp, a=-3, b=6, h=0.01)
    lhs, rhs = common(delta_s(preimage_delta(g, s), s), g)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * max(1, abs(amp))


def test_zero_set_examples():
    assert CircleField((1, -1)).zero_set == ((0.0, 2),)
    z = CircleField((0,), (1,)).zero_set
    assert [m for _, m in z] == [1, 1]
    assert np.allclose([p for p, _ in z], [0, math.pi], atol=1e-9)
    z = CircleField((0.5, 1)).zero_set
    assert np.allclose([p for p, _ in z], [2 * math.pi / 3, 4 * math.pi / 3], atol=1e-9)
    for p, _ in z:
        assert abs(CircleField((0.5, 1))(p)) <= 1e-9
    assert CircleField((1.0,)).zero_set == ()


def test_rotation_flow_pullback():
    curve = integrate_circle_flow(CircleField((1.0,)), 0.3, 5, 0.01)
    diff = np.angle(np.exp(1j * (curve.values - 0.3 - curve.t_grid)))
    assert np.max(np.abs(diff)) <= 1e-12
    pb = pullback_along_flow(np.cos, curve)
    assert np.allclose(pb.samples, np.cos(0.3 + curve.t_grid), atol=1e-12)
    const = pullback_along_flow(lambda p: 2.0, curve)
    assert np.all(const.samples == 2.0)
    assert curve.to_csv().splitlines()[0] == "t,phi"


def test_one_minus_cos_limits():
    Z = CircleField((1, -1))
    curve = integrate_circle_flow(Z, math.pi, 80, 0.05)
    assert 2 * math.pi - curve.values[-1] < 0.05
    assert curve.values[0] < 0.05
    # exact solution: cot(phi/2) = -t
    phi = 2 * np.arctan2(1, -curve.t_grid)
    assert np.max(np.abs(curve.values - phi)) < 1e-8
    f = TrigPolynomial((0.2, 1.0), (0.5,))
    pb = pullback_along_flow(f, curve)
    assert abs(pb.samples[-1] - f(0)) < 0.05 and abs(pb.samples[0] - f(0)) < 0.05


def test_tail_oscillation_decreases():
    Z = CircleField((1, -1))
    pb = pullback_along_flow(TrigPolynomial((0, 1.0)), integrate_circle_flow(Z, math.pi, 80, 0.05))
    for side in (1, -1):
        osc = [tail_oscillation(pb, T, side) for T in (10, 20, 40)]
        assert osc[0] > osc[1] > osc[2]


def test_step_rejection():
    with pytest.raises(StepRejection):
        integrate_circle_flow(CircleField((0, 30)), 0.1, 1, 0.5)
