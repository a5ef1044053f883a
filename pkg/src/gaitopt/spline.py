"""Quartic CoM spline: evaluation, junction continuity, segmentation.

The CoM trajectory is a chain of quartic 2D polynomials in local time
tau = t - t_k. Velocity and acceleration come from exact differentiation
of the same coefficients, so position/velocity consistency is built into
the parametrization rather than enforced as a constraint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gait import ContactSchedule


@dataclass
class QuarticPoly2D:
    """Five 2D coefficients; row i multiplies tau**i."""

    coeffs: np.ndarray
    start_time: float
    duration: float

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float).reshape(5, 2)
        if not self.duration > 0:
            raise ValueError("polynomial duration must be positive")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("coefficients must be finite")

    def position(self, tau: float) -> np.ndarray:
        powers = tau ** np.arange(5)
        return powers @ self.coeffs

    def velocity(self, tau: float) -> np.ndarray:
        i = np.arange(1, 5)
        return (i * tau ** (i - 1)) @ self.coeffs[1:]

    def acceleration(self, tau: float) -> np.ndarray:
        i = np.arange(2, 5)
        return (i * (i - 1) * tau ** (i - 2)) @ self.coeffs[2:]


class ComSpline:
    """Contiguous quartic segments covering [0, T]."""

    def __init__(self, polys):
        self.polys = list(polys)
        if not self.polys:
            raise ValueError("spline needs at least one polynomial")
        for a, b in zip(self.polys, self.polys[1:]):
            if abs(a.start_time + a.duration - b.start_time) > 1e-9:
                raise ValueError("polynomials must tile the horizon without gaps")
        self.junctions = np.array([p.start_time for p in self.polys]
                                  + [self.polys[-1].start_time + self.polys[-1].duration])

    @classmethod
    def from_junctions(cls, junction_times, coeffs) -> "ComSpline":
        """Build from junction times (n_p + 1,) and coefficients (n_p, 5, 2)."""
        junction_times = np.asarray(junction_times, dtype=float)
        coeffs = np.asarray(coeffs, dtype=float).reshape(-1, 5, 2)
        if len(junction_times) != len(coeffs) + 1:
            raise ValueError("need one more junction time than polynomials")
        polys = [QuarticPoly2D(c, t0, t1 - t0)
                 for c, t0, t1 in zip(coeffs, junction_times, junction_times[1:])]
        return cls(polys)

    @property
    def T(self) -> float:
        return float(self.junctions[-1])

    @property
    def n_polys(self) -> int:
        return len(self.polys)

    def segment_index(self, t: float) -> int:
        """Segment containing t; at junctions the incoming polynomial."""
        if t < -1e-12 or t > self.T + 1e-12:
            raise ValueError(f"t={t} outside spline horizon [0, {self.T}]")
        idx = int(np.searchsorted(self.junctions, t, side="right")) - 1
        return min(max(idx, 0), len(self.polys) - 1)

    def evaluate(self, t: float):
        """Position, velocity, acceleration at time t."""
        p = self.polys[self.segment_index(t)]
        tau = t - p.start_time
        return p.position(tau), p.velocity(tau), p.acceleration(tau)

    def continuity_residual(self, k: int) -> np.ndarray:
        """Position/velocity mismatch at the junction after segment k.

        Returns a 4-vector (dpos_x, dpos_y, dvel_x, dvel_y); zero iff the
        spline is C1 there. k indexes junctions 0 .. n_polys - 2.
        """
        if not 0 <= k < len(self.polys) - 1:
            raise IndexError(f"junction index {k} out of range")
        a, b = self.polys[k], self.polys[k + 1]
        dpos = a.position(a.duration) - b.coeffs[0]
        dvel = a.velocity(a.duration) - b.coeffs[1]
        return np.concatenate([dpos, dvel])


def subdivide_intervals(boundaries, max_len: float) -> np.ndarray:
    """Uniformly subdivide each [b_i, b_i+1] so no piece exceeds max_len.

    Original boundary values are preserved exactly.
    """
    if max_len <= 0:
        raise ValueError("max_len must be positive")
    boundaries = np.asarray(boundaries, dtype=float)
    out = [boundaries[:1]]
    for b0, b1 in zip(boundaries, boundaries[1:]):
        m = max(1, math.ceil((b1 - b0) / max_len - 1e-9))
        out.append(np.linspace(b0, b1, m + 1)[1:])
    return np.concatenate(out)


def build_segmentation(schedule: ContactSchedule, max_poly_duration: float) -> np.ndarray:
    """Junction times for the CoM spline over a contact schedule.

    Every phase boundary becomes a junction (the feasible CoP set jumps
    there) and each phase is split uniformly so no polynomial is longer
    than ``max_poly_duration``.
    """
    return subdivide_intervals(schedule.boundaries, max_poly_duration)
