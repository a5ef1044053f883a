import math

import numpy as np
import pytest

from gaitopt.gait import ContactSchedule, Phase, QUADRUPED_FEET, build_gait
from gaitopt.spline import (ComSpline, QuarticPoly2D, build_segmentation,
                            subdivide_intervals)


def test_constant_polynomial():
    c = np.array([0.4, -0.2])
    coeffs = np.zeros((5, 2))
    coeffs[0] = c
    spline = ComSpline([QuarticPoly2D(coeffs, 0.0, 1.0)])
    for t in [0.0, 0.3, 1.0]:
        pos, vel, acc = spline.evaluate(t)
        np.testing.assert_allclose(pos, c)
        np.testing.assert_allclose(vel, 0.0)
        np.testing.assert_allclose(acc, 0.0)


def test_segment_start_values():
    coeffs = np.arange(10.0).reshape(5, 2)
    spline = ComSpline([QuarticPoly2D(coeffs, 0.0, 0.5)])
    pos, vel, _ = spline.evaluate(0.0)
    np.testing.assert_allclose(pos, coeffs[0])
    np.testing.assert_allclose(vel, coeffs[1])


def test_hand_evaluated_polynomial():
    # x coefficients all ones (orders 1..4), local time 0.2:
    # pos = 0.2 + 0.04 + 0.008 + 0.0016 = 0.2496
    # vel = 1 + 0.4 + 0.12 + 0.032 = 1.552
    coeffs = np.zeros((5, 2))
    coeffs[1:, 0] = 1.0
    spline = ComSpline([QuarticPoly2D(coeffs, 0.0, 1.0)])
    pos, vel, _ = spline.evaluate(0.2)
    np.testing.assert_allclose(pos, [0.2496, 0.0], rtol=1e-12)
    np.testing.assert_allclose(vel, [1.552, 0.0], rtol=1e-12)


def _taylor_shift(coeffs, dt):
    """Coefficients of p(t + dt) given coefficients of p(t), per axis."""
    out = np.zeros_like(coeffs)
    n = len(coeffs)
    for i in range(n):
        for j in range(i, n):
            out[i] += coeffs[j] * math.comb(j, i) * dt ** (j - i)
    return out


def test_split_global_quartic_is_continuous():
    rng = np.random.default_rng(3)
    coeffs = rng.normal(size=(5, 2))
    t_split = 0.37
    left = QuarticPoly2D(coeffs, 0.0, t_split)
    right = QuarticPoly2D(_taylor_shift(coeffs, t_split), t_split, 1.0 - t_split)
    spline = ComSpline([left, right])
    assert np.all(np.abs(spline.continuity_residual(0)) < 1e-12)


def test_constant_mismatch_residual():
    a = np.zeros((5, 2))
    a[0] = [1.0, 2.0]
    b = np.zeros((5, 2))
    b[0] = [1.5, 1.0]
    spline = ComSpline([QuarticPoly2D(a, 0.0, 0.5), QuarticPoly2D(b, 0.5, 0.5)])
    res = spline.continuity_residual(0)
    np.testing.assert_allclose(res, [-0.5, 1.0, 0.0, 0.0])


def test_residual_matches_eval_definition():
    rng = np.random.default_rng(4)
    polys = []
    t = 0.0
    for _ in range(3):
        d = rng.uniform(0.1, 0.4)
        polys.append(QuarticPoly2D(rng.normal(size=(5, 2)), t, d))
        t += d
    spline = ComSpline(polys)
    for k in range(2):
        a, b = polys[k], polys[k + 1]
        expected = np.concatenate([a.position(a.duration) - b.position(0.0),
                                   a.velocity(a.duration) - b.velocity(0.0)])
        np.testing.assert_allclose(spline.continuity_residual(k), expected, atol=1e-12)


def test_residual_index_range():
    spline = ComSpline([QuarticPoly2D(np.zeros((5, 2)) + [[1, 1]] * 5, 0.0, 1.0)])
    with pytest.raises(IndexError):
        spline.continuity_residual(0)


def test_evaluate_uses_incoming_polynomial_at_junction():
    a = np.zeros((5, 2))
    a[0] = [0.0, 0.0]
    b = np.zeros((5, 2))
    b[0] = [9.0, 9.0]
    spline = ComSpline([QuarticPoly2D(a, 0.0, 0.5), QuarticPoly2D(b, 0.5, 0.5)])
    pos, _, _ = spline.evaluate(0.5)
    np.testing.assert_allclose(pos, [9.0, 9.0])


def test_derivative_consistency_finite_difference():
    rng = np.random.default_rng(5)
    spline = ComSpline([QuarticPoly2D(rng.normal(size=(5, 2)), 0.0, 0.6)])
    eps = 1e-5
    for t in rng.uniform(eps, 0.6 - eps, size=10):
        p_plus, _, _ = spline.evaluate(t + eps)
        p_minus, _, _ = spline.evaluate(t - eps)
        _, vel, _ = spline.evaluate(t)
        assert np.all(np.abs((p_plus - p_minus) / (2 * eps) - vel) < 1e-6)


def test_acceleration_is_quadratic():
    # third difference of acceleration samples of a quartic vanishes
    rng = np.random.default_rng(6)
    poly = QuarticPoly2D(rng.normal(size=(5, 2)), 0.0, 1.0)
    taus = np.linspace(0, 1, 9)
    acc = np.array([poly.acceleration(t) for t in taus])
    third = np.diff(acc, n=3, axis=0)
    assert np.all(np.abs(third) < 1e-10)


def test_subdivide_single():
    out = subdivide_intervals([0.0, 0.1], 0.1)
    np.testing.assert_allclose(out, [0.0, 0.1])


def test_subdivide_ceil():
    out = subdivide_intervals([0.0, 0.25], 0.1)
    np.testing.assert_allclose(out, [0.0, 0.25 / 3, 0.5 / 3, 0.25], atol=1e-15)


def test_segmentation_includes_phase_boundaries():
    s = build_gait("trot", n_steps=2, swing_duration=0.3, lead_in=0.4, lead_out=0.4)
    junctions = build_segmentation(s, 0.05)
    for b in s.boundaries:
        assert np.any(np.abs(junctions - b) < 1e-12)
    assert np.max(np.diff(junctions)) <= 0.05 + 1e-12
    assert junctions[0] == 0.0 and junctions[-1] == s.T


def test_segmentation_covers_horizon():
    s = ContactSchedule(QUADRUPED_FEET, [Phase(0.13, (True,) * 4),
                                         Phase(0.27, (True, True, True, False))])
    junctions = build_segmentation(s, 0.06)
    np.testing.assert_allclose(np.sum(np.diff(junctions)), s.T, atol=1e-12)
    assert junctions[-1] == s.boundaries[-1]
