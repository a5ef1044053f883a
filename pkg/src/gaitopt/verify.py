"""Independent solution checks.

Nothing here reuses the optimizer's residual code: support areas are
tested geometrically (convex hull plus point-to-boundary distance), the
dynamics by forward RK4 integration of the pendulum ODE, and analytic
derivatives by central finite differences. A solution that satisfies the
NLP constraints only because both sides share a bug cannot pass these.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lip import PendulumParams, PendulumState, simulate
from .motion import Motion


def convex_hull(points: np.ndarray) -> np.ndarray:
    """Convex hull by monotone chain, counter-clockwise, no repeated point.

    Degenerate inputs (single point, collinear set) return the one or two
    extreme points.
    """
    pts = np.unique(np.asarray(points, dtype=float).reshape(-1, 2), axis=0)
    if len(pts) == 0:
        raise ValueError("empty point set")
    if len(pts) == 1:
        return pts
    # lexicographic sort, then build lower and upper chains
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) == 0:  # all points collinear: keep the two extremes
        hull = np.array([pts[0], pts[-1]])
    return hull


def point_segment_distance(p, a, b) -> float:
    p, a, b = (np.asarray(v, dtype=float) for v in (p, a, b))
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.linalg.norm(p - a))
    s = np.clip((p - a) @ ab / denom, 0.0, 1.0)
    return float(np.linalg.norm(p - (a + s * ab)))


def hull_containment(u, points) -> float:
    """Signed distance of u to the convex hull boundary of a point set.

    Negative inside, positive outside, zero on the boundary. Degenerate
    hulls (a point or a segment) have no interior, so the result is the
    plain distance, never negative.
    """
    u = np.asarray(u, dtype=float).reshape(2)
    hull = convex_hull(points)
    if len(hull) == 1:
        return float(np.linalg.norm(u - hull[0]))
    if len(hull) == 2:
        return point_segment_distance(u, hull[0], hull[1])
    edges = list(zip(hull, np.roll(hull, -1, axis=0)))
    dist = min(point_segment_distance(u, a, b) for a, b in edges)
    inside = all((b[0] - a[0]) * (u[1] - a[1]) - (b[1] - a[1]) * (u[0] - a[0]) >= 0
                 for a, b in edges)
    return -dist if inside else dist


@dataclass
class VerificationReport:
    """Outcome of the independent checks on one solved motion."""

    max_hull_violation: float
    min_boundary_distance: float
    terminal_position_error: float
    terminal_velocity_error: float
    max_rom_violation: float
    hull_tol: float
    rom_tol: float
    terminal_tol: float
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "max_hull_violation": self.max_hull_violation,
            "min_boundary_distance": self.min_boundary_distance,
            "terminal_position_error": self.terminal_position_error,
            "terminal_velocity_error": self.terminal_velocity_error,
            "max_rom_violation": self.max_rom_violation,
            "tolerances": {"hull": self.hull_tol, "rom": self.rom_tol,
                           "terminal": self.terminal_tol},
            "checks": dict(self.checks),
            "passed": self.passed,
        }


def contact_vertex_cloud(motion: Motion, t: float) -> np.ndarray:
    """World vertices of all feet in contact at time t."""
    flags = motion.schedule.contact_flags(t)
    clouds = [motion.plan.world_vertices_at(f, t)
              for f in range(motion.plan.n_feet) if flags[f]]
    return np.vstack(clouds)


def check_solution(motion: Motion, sample_dt: float = 0.005,
                   hull_tol: float = 1e-6, rom_tol: float = 1e-6,
                   terminal_tol: float = 0.01,
                   integration_dt: float = 1e-3) -> VerificationReport:
    """Run all independent checks on a motion.

    (a) the CoP stays inside the support hull at a sampling 4x finer than
    the load grid, (b) RK4 integration of the pendulum ODE driven by the
    motion's own CoP reproduces the spline's terminal state, (c) feet stay
    within their range-of-motion box at every sample, (d) the minimum
    CoP-to-boundary distance is recorded as a robustness measure.
    Violations are reported, never raised.
    """
    T = motion.schedule.T
    ts = np.arange(0.0, T + sample_dt / 2, sample_dt)
    ts[-1] = min(ts[-1], T)

    max_hull = -np.inf
    min_boundary = np.inf
    max_rom = -np.inf
    r = motion.rom_half_extents
    for t in ts:
        u = motion.cop(t)
        signed = hull_containment(u, contact_vertex_cloud(motion, t))
        max_hull = max(max_hull, signed)
        min_boundary = min(min_boundary, -signed)
        pos, _, _ = motion.spline.evaluate(t)
        for f in range(motion.plan.n_feet):
            p, _ = motion.plan.foot_pose(f, t)
            excess = np.abs(p - pos - motion.nominal_stance[f]) - r
            max_rom = max(max_rom, float(np.max(excess)))

    # forward integration with the motion's own piecewise-constant CoP
    pos0, vel0, _ = motion.spline.evaluate(0.0)
    x0 = PendulumState(pos0, vel0)
    res = simulate(x0, motion.cop, T, dt=integration_dt, params=motion.params,
                   breakpoints=motion.loads.node_bounds[1:-1])
    posT, velT, _ = motion.spline.evaluate(T)
    term_pos = float(np.linalg.norm(res.c[-1] - posT))
    term_vel = float(np.linalg.norm(res.c_dot[-1] - velT))

    checks = {
        "cop_inside_hull": max_hull <= hull_tol,
        "rom_respected": max_rom <= rom_tol,
        "dynamics_consistent": term_pos <= terminal_tol,
    }
    return VerificationReport(
        max_hull_violation=float(max(max_hull, 0.0)),
        min_boundary_distance=float(min_boundary),
        terminal_position_error=term_pos,
        terminal_velocity_error=term_vel,
        max_rom_violation=float(max(max_rom, 0.0)),
        hull_tol=hull_tol, rom_tol=rom_tol, terminal_tol=terminal_tol,
        checks=checks,
    )


def finite_diff_jacobian(problem, w, step: float = 1e-6) -> dict:
    """Max relative error of each constraint block's analytic Jacobian.

    Central differences of ``problem.residuals`` against
    ``problem.jacobian``; relative to max(1, |analytic entry|).
    """
    w = np.asarray(w, dtype=float)
    J = problem.jacobian(w).toarray()
    J_fd = np.zeros_like(J)
    for j in range(len(w)):
        wp = w.copy()
        wm = w.copy()
        wp[j] += step
        wm[j] -= step
        J_fd[:, j] = (problem.residuals(wp) - problem.residuals(wm)) / (2 * step)
    errors = {}
    for block in problem.blocks:
        diff = np.abs(J_fd[block.rows] - J[block.rows])
        scale = np.maximum(1.0, np.abs(J[block.rows]))
        errors[block.name] = float(np.max(diff / scale)) if diff.size else 0.0
    return errors


def finite_diff_cost_gradient(problem, w, step: float = 1e-6) -> float:
    """Max relative error of the analytic cost gradient."""
    w = np.asarray(w, dtype=float)
    _, grad = problem.cost_and_grad(w)
    err = 0.0
    for j in range(len(w)):
        wp = w.copy()
        wm = w.copy()
        wp[j] += step
        wm[j] -= step
        fd = (problem.cost_and_grad(wp)[0] - problem.cost_and_grad(wm)[0]) / (2 * step)
        err = max(err, abs(fd - grad[j]) / max(1.0, abs(grad[j])))
    return err
