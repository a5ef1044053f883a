"""Pendulum model tests: hand-derived values and cross-oracle checks."""

import numpy as np
import pytest

from gaitopt.lip import (PendulumParams, PendulumState, analytic_solution,
                         capture_point, com_acceleration, simulate)

PARAMS = PendulumParams(g=9.81, h=0.6)


def test_params_validation():
    with pytest.raises(ValueError):
        PendulumParams(g=-1.0, h=0.6)
    with pytest.raises(ValueError):
        PendulumParams(g=9.81, h=0.0)


def test_acceleration_zero_at_upright():
    state = PendulumState([0.3, -0.1], [0.0, 0.0])
    acc = com_acceleration(state, [0.3, -0.1], PARAMS)
    np.testing.assert_allclose(acc, [0.0, 0.0])


def test_acceleration_hand_values():
    # (c - u) = (0.1, 0), h = 0.6: 0.1 * 9.81 / 0.6 = 1.635
    state = PendulumState([0.1, 0.0], [0.0, 0.0])
    acc = com_acceleration(state, [0.0, 0.0], PARAMS)
    np.testing.assert_allclose(acc, [1.635, 0.0], rtol=1e-12)

    p58 = PendulumParams(g=9.81, h=0.58)
    state = PendulumState([0.5, 0.2], [0.0, 0.0])
    acc = com_acceleration(state, [0.4, 0.25], p58)
    np.testing.assert_allclose(acc, [0.1 * 9.81 / 0.58, -0.05 * 9.81 / 0.58], rtol=1e-12)


def test_acceleration_linear_in_offset():
    rng = np.random.default_rng(7)
    for _ in range(20):
        c = rng.normal(size=2)
        u = rng.normal(size=2)
        a1 = com_acceleration(PendulumState(c, [0, 0]), u, PARAMS)
        a2 = com_acceleration(PendulumState(u + 2 * (c - u), [0, 0]), u, PARAMS)
        np.testing.assert_allclose(a2, 2 * a1, rtol=1e-12)


def test_analytic_initial_condition():
    x0 = PendulumState([0.2, -0.4], [0.5, 0.1])
    x = analytic_solution(x0, [0.0, 0.0], 0.0, PARAMS)
    np.testing.assert_allclose(x.c, x0.c, atol=1e-15)
    np.testing.assert_allclose(x.c_dot, x0.c_dot, atol=1e-15)


def test_analytic_equilibrium():
    u0 = np.array([0.3, 0.7])
    x0 = PendulumState(u0, [0.0, 0.0])
    for t in [0.0, 0.5, 2.0]:
        x = analytic_solution(x0, u0, t, PARAMS)
        np.testing.assert_allclose(x.c, u0, atol=1e-12)
        np.testing.assert_allclose(x.c_dot, 0.0, atol=1e-12)


def test_analytic_hand_value():
    # x0 = (0, v=1), u0 = 0: b1 = -b2 = 1/(2w), c(t) = sinh(w t)/w
    w = PARAMS.omega
    x = analytic_solution(PendulumState([0, 0], [1, 0]), [0, 0], 0.1, PARAMS)
    expected = (np.exp(0.1 * w) - np.exp(-0.1 * w)) / (2 * w)
    np.testing.assert_allclose(x.c, [expected, 0.0], rtol=1e-12)


def test_capture_point_at_rest():
    x0 = PendulumState([0.4, -0.2], [0.0, 0.0])
    np.testing.assert_allclose(capture_point(x0, PARAMS), x0.c)


def test_capture_point_value():
    # u = c + c_dot / omega; omega = sqrt(9.81 / 0.6)
    x0 = PendulumState([0.0, 0.0], [1.0, 0.0])
    cp = capture_point(x0, PARAMS)
    np.testing.assert_allclose(cp, [np.sqrt(0.6 / 9.81), 0.0], rtol=1e-12)


def test_capture_point_translation_invariance():
    rng = np.random.default_rng(11)
    for _ in range(50):
        c = rng.normal(size=2)
        cd = rng.normal(size=2)
        d = rng.normal(size=2)
        a = capture_point(PendulumState(c + d, cd), PARAMS)
        b = capture_point(PendulumState(c, cd), PARAMS) + d
        np.testing.assert_allclose(a, b, atol=1e-14)


def test_simulate_equilibrium():
    c0 = np.array([0.1, 0.2])
    res = simulate(PendulumState(c0, [0, 0]), lambda t: c0, T=1.0, dt=1e-2, params=PARAMS)
    np.testing.assert_allclose(res.c, np.tile(c0, (len(res.t), 1)), atol=1e-14)
    np.testing.assert_allclose(res.c_dot, 0.0, atol=1e-14)


def test_simulate_matches_analytic_constant_input():
    x0 = PendulumState([0.05, -0.02], [0.3, 0.4])
    u0 = np.array([0.1, 0.1])
    res = simulate(x0, lambda t: u0, T=0.3, dt=1e-4, params=PARAMS)
    exact = analytic_solution(x0, u0, 0.3, PARAMS)
    assert np.linalg.norm(res.c[-1] - exact.c) < 1e-8
    assert np.linalg.norm(res.c_dot[-1] - exact.c_dot) < 1e-8


def test_simulate_capture_point_brings_to_rest():
    x0 = PendulumState([0.0, 0.0], [1.0, 0.0])
    cp = capture_point(x0, PARAMS)
    res = simulate(x0, lambda t: cp, T=5.0, dt=1e-3, params=PARAMS)
    assert np.linalg.norm(res.c_dot[-1]) < 1e-4
    # Beyond ~5 s forward integration cannot certify convergence: the
    # pendulum's unstable mode amplifies truncation error by exp(omega*T).
    # The closed form shows the true trajectory settles on the capture point.
    x10 = analytic_solution(x0, cp, 10.0, PARAMS)
    assert np.linalg.norm(x10.c_dot) < 1e-6
    np.testing.assert_allclose(x10.c, cp, atol=1e-6)


def test_simulate_capture_point_speed_monotone():
    x0 = PendulumState([0.2, -0.1], [0.6, -0.4])
    cp = capture_point(x0, PARAMS)
    res = simulate(x0, lambda t: cp, T=2.0, dt=1e-3, params=PARAMS)
    speed = np.linalg.norm(res.c_dot, axis=1)
    assert np.all(np.diff(speed) <= 1e-12)


def test_simulate_rk4_order():
    # global RK4 error drops by >= 8x when the step is halved
    x0 = PendulumState([0.3, 0.0], [0.0, 0.5])
    u0 = np.array([0.0, 0.0])

    def max_err(dt):
        res = simulate(x0, lambda t: u0, T=0.3, dt=dt, params=PARAMS)
        errs = [np.linalg.norm(res.c[i] - analytic_solution(x0, u0, t, PARAMS).c)
                for i, t in enumerate(res.t)]
        return max(errs)

    e_coarse = max_err(0.02)
    e_fine = max_err(0.01)
    assert e_coarse > 1e-12  # above roundoff so the ratio is meaningful
    assert e_coarse / e_fine >= 8.0


def test_simulate_partial_final_step():
    x0 = PendulumState([0.1, 0.0], [0.0, 0.0])
    res = simulate(x0, lambda t: np.zeros(2), T=0.25, dt=0.1, params=PARAMS)
    np.testing.assert_allclose(res.t, [0.0, 0.1, 0.2, 0.25])


def test_simulate_rejects_bad_input():
    x0 = PendulumState([0, 0], [0, 0])
    with pytest.raises(ValueError):
        simulate(x0, lambda t: [np.nan, 0.0], T=0.1, dt=0.01, params=PARAMS)
    with pytest.raises(ValueError):
        simulate(x0, lambda t: [0.0, 0.0], T=0.1, dt=0.0, params=PARAMS)


def test_simulate_piecewise_constant_breakpoints():
    # steps are split at the breakpoint, so chaining the analytic solution
    # over the two spans agrees up to plain RK4 truncation
    x0 = PendulumState([0.0, 0.0], [0.2, -0.1])
    u_a, u_b = np.array([0.05, 0.0]), np.array([-0.02, 0.04])

    def u(t):
        return u_a if t < 0.15 else u_b

    res = simulate(x0, u, T=0.3, dt=1e-3, params=PARAMS, breakpoints=[0.15])
    mid = analytic_solution(x0, u_a, 0.15, PARAMS)
    exact = analytic_solution(mid, u_b, 0.15, PARAMS)
    assert np.linalg.norm(res.c[-1] - exact.c) < 1e-10
    assert np.linalg.norm(res.c_dot[-1] - exact.c_dot) < 1e-10


def test_simulate_unaligned_breakpoint_not_smeared():
    # breakpoint off the dt grid: without splitting, the step straddling
    # the jump would see a mixed input; with splitting the error stays at
    # truncation level
    x0 = PendulumState([0.0, 0.0], [0.2, -0.1])
    u_a, u_b = np.array([0.08, 0.0]), np.array([-0.05, 0.03])
    t_jump = 0.0937

    def u(t):
        return u_a if t < t_jump else u_b

    res = simulate(x0, u, T=0.3, dt=1e-2, params=PARAMS, breakpoints=[t_jump])
    mid = analytic_solution(x0, u_a, t_jump, PARAMS)
    exact = analytic_solution(mid, u_b, 0.3 - t_jump, PARAMS)
    assert np.linalg.norm(res.c[-1] - exact.c) < 1e-7
