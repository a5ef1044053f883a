"""Linear inverted pendulum model: dynamics, closed-form solution, capture point.

The robot is reduced to a point mass at constant height ``h`` whose
horizontal acceleration is driven by the offset between the center of mass
``c`` and the center of pressure ``u``:

    c_ddot = (g / h) * (c - u)

Both ``c`` and ``u`` are 2D ground-plane coordinates. Besides providing the
dynamics used by the optimizer, this module doubles as an independent
oracle: ``simulate`` integrates the ODE with classical RK4 and
``analytic_solution`` gives the exact trajectory for a constant center of
pressure, so optimized motions can be cross-checked without touching any
NLP code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np


@dataclass(frozen=True)
class PendulumParams:
    """Gravity and pendulum height; both must be positive."""

    g: float = 9.81
    h: float = 0.6

    def __post_init__(self):
        if not (self.g > 0 and self.h > 0):
            raise ValueError(f"g and h must be positive, got g={self.g}, h={self.h}")

    @property
    def omega(self) -> float:
        """Natural frequency sqrt(g/h) of the tipping pendulum."""
        return math.sqrt(self.g / self.h)


@dataclass
class PendulumState:
    """Planar CoM position and velocity."""

    c: np.ndarray
    c_dot: np.ndarray

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(2)
        self.c_dot = np.asarray(self.c_dot, dtype=float).reshape(2)
        if not (np.all(np.isfinite(self.c)) and np.all(np.isfinite(self.c_dot))):
            raise ValueError("pendulum state must be finite")

    def copy(self) -> "PendulumState":
        return PendulumState(self.c.copy(), self.c_dot.copy())


class SimulationResult(NamedTuple):
    t: np.ndarray       # (n,)
    c: np.ndarray       # (n, 2)
    c_dot: np.ndarray   # (n, 2)

    @property
    def final(self) -> PendulumState:
        return PendulumState(self.c[-1], self.c_dot[-1])


def com_acceleration(state: PendulumState, u, params: PendulumParams) -> np.ndarray:
    """CoM acceleration (g/h)(c - u) for center of pressure ``u``."""
    u = np.asarray(u, dtype=float).reshape(2)
    return (state.c - u) * (params.g / params.h)


def capture_point(state: PendulumState, params: PendulumParams) -> np.ndarray:
    """Ground point where a constant CoP brings the pendulum to rest.

    Holding u at c0 + c_dot0 / omega cancels the growing exponential mode,
    so position converges to u and velocity decays to zero.
    """
    return state.c + state.c_dot / params.omega


def analytic_solution(x0: PendulumState, u0, t: float,
                      params: PendulumParams) -> PendulumState:
    """Exact pendulum state at time ``t`` under a constant CoP ``u0``.

    Per axis the solution is b1*exp(w*t) + b2*exp(-w*t) + u0 with
    b1,2 = (c0 - u0 +- c_dot0/w) / 2 and w = sqrt(g/h).
    """
    u0 = np.asarray(u0, dtype=float).reshape(2)
    w = params.omega
    b1 = 0.5 * (x0.c - u0 + x0.c_dot / w)
    b2 = 0.5 * (x0.c - u0 - x0.c_dot / w)
    ep = math.exp(w * t)
    em = math.exp(-w * t)
    c = b1 * ep + b2 * em + u0
    c_dot = w * (b1 * ep - b2 * em)
    return PendulumState(c, c_dot)


def _rk4_step(c, c_dot, dt, goh, u1, u2, u4):
    # u1, u2, u4 are the CoP values at the step start, midpoint and end.
    k1_c, k1_v = c_dot, (c - u1) * goh
    k2_c, k2_v = c_dot + 0.5 * dt * k1_v, (c + 0.5 * dt * k1_c - u2) * goh
    k3_c, k3_v = c_dot + 0.5 * dt * k2_v, (c + 0.5 * dt * k2_c - u2) * goh
    k4_c, k4_v = c_dot + dt * k3_v, (c + dt * k3_c - u4) * goh
    c_new = c + dt / 6.0 * (k1_c + 2 * k2_c + 2 * k3_c + k4_c)
    v_new = c_dot + dt / 6.0 * (k1_v + 2 * k2_v + 2 * k3_v + k4_v)
    return c_new, v_new


def simulate(x0: PendulumState, cop: Callable[[float], Sequence[float]],
             T: float, dt: float = 1e-3, params: PendulumParams = PendulumParams(),
             breakpoints: Sequence[float] | None = None) -> SimulationResult:
    """RK4 forward integration of the pendulum under a time-varying CoP.

    Samples are returned at multiples of ``dt`` (plus a final partial step
    when ``T`` is not divisible by ``dt``). The CoP callable is queried at
    the RK4 stage times with no interpolation. When ``breakpoints`` are
    given the input is treated as piecewise constant between them:
    integration steps are split at every breakpoint and the CoP is queried
    once per span (at its start, matching the right-continuous convention),
    so discontinuities are never smeared across a step.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if T < 0:
        raise ValueError("T must be non-negative")

    n_full = int(math.floor(T / dt + 1e-12))
    sample_times = [k * dt for k in range(n_full + 1)]
    if sample_times[-1] < T - 1e-12 * max(T, 1.0):
        sample_times.append(T)
    sample_times = np.asarray(sample_times)

    goh = params.g / params.h

    def query(t):
        val = np.asarray(cop(t), dtype=float).reshape(2)
        if not np.all(np.isfinite(val)):
            raise ValueError(f"cop({t}) is not finite: {val}")
        return val

    if breakpoints is not None:
        bps = np.asarray(sorted({float(b) for b in np.atleast_1d(breakpoints)
                                 if 0.0 < b < T}))
        grid = np.union1d(sample_times, bps)
        edges = np.concatenate([[0.0], bps])
        # one query per constant span, at its start (right-continuous)
        span_u = [query(e) for e in edges]
        span_of = np.searchsorted(edges, grid[:-1] + 1e-15, side="right") - 1
    else:
        grid = sample_times

    c = x0.c.copy()
    v = x0.c_dot.copy()
    out_c = [c.copy()]
    out_v = [v.copy()]
    is_sample = np.isin(grid, sample_times)
    for i in range(len(grid) - 1):
        t0, t1 = grid[i], grid[i + 1]
        h = t1 - t0
        if breakpoints is not None:
            u1 = u2 = u4 = span_u[span_of[i]]
        else:
            u1 = query(t0)
            u2 = query(t0 + 0.5 * h)
            u4 = query(t1)
        c, v = _rk4_step(c, v, h, goh, u1, u2, u4)
        if is_sample[i + 1]:
            out_c.append(c.copy())
            out_v.append(v.copy())
    return SimulationResult(sample_times, np.array(out_c), np.array(out_v))
