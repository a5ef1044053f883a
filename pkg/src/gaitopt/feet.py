"""Foot trajectories: stance holds, cubic swing interpolation, vertex geometry.

A foot alternates between stance intervals, where its ground-plane pose
(x, y, yaw) is constant, and swings, where the pose follows a cubic with
zero velocity at both ends so feet touch down smoothly. Only the ground
plane is modeled; the vertical swing profile has no effect on the CoM
problem and is left to the tracking layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gait import ContactSchedule


@dataclass(frozen=True)
class FootGeometry:
    """Contact vertex offsets in the foot frame, one row per vertex."""

    vertices: tuple

    def __post_init__(self):
        arr = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        if arr.shape[0] < 1:
            raise ValueError("a foot needs at least one vertex")
        if arr.shape[0] > 1:
            for i in range(arr.shape[0]):
                for j in range(i + 1, arr.shape[0]):
                    if np.allclose(arr[i], arr[j]):
                        raise ValueError("vertices must be distinct")
        object.__setattr__(self, "vertices", tuple(map(tuple, arr)))

    @classmethod
    def point(cls) -> "FootGeometry":
        return cls(((0.0, 0.0),))

    @classmethod
    def square(cls, half_width: float) -> "FootGeometry":
        w = float(half_width)
        return cls(((w, w), (w, -w), (-w, -w), (-w, w)))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)

    @property
    def is_point(self) -> bool:
        return self.n_vertices == 1 and np.allclose(self.array, 0.0)


def rotation(alpha: float) -> np.ndarray:
    c, s = np.cos(alpha), np.sin(alpha)
    return np.array([[c, -s], [s, c]])


def world_vertices(p, alpha: float, geometry: FootGeometry) -> np.ndarray:
    """Vertex positions p + R(alpha) * v in world coordinates, (n_v, 2)."""
    p = np.asarray(p, dtype=float).reshape(2)
    return p + geometry.array @ rotation(alpha).T


def swing_blend(s: float) -> float:
    """Cubic blend 3s^2 - 2s^3: 0 -> 1 with zero slope at both ends."""
    return s * s * (3.0 - 2.0 * s)


@dataclass
class Stance:
    """Constant foot pose held over [t_start, t_end]."""

    position: np.ndarray
    orientation: float
    t_start: float
    t_end: float

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float).reshape(2)
        if self.t_end < self.t_start:
            raise ValueError("stance interval must not be reversed")


class FootTimeline:
    """Stance/swing interval structure of one foot, derived from a schedule.

    Independent of where the footholds end up, so the NLP can precompute
    interpolation weights before any decision values exist.
    """

    def __init__(self, schedule: ContactSchedule, foot: int):
        self.holds = schedule.contact_intervals(foot)
        self.T = schedule.T

    @property
    def n_stances(self) -> int:
        return len(self.holds)

    def blend(self, t: float):
        """(j0, j1, w0, w1): stance indices and weights with w0 + w1 = 1.

        During a hold this is (j, j, 1, 0); during a swing the cubic blend
        between the enclosing stances.
        """
        if t < -1e-12 or t > self.T + 1e-12:
            raise ValueError(f"t={t} outside horizon [0, {self.T}]")
        for j, (s, e) in enumerate(self.holds):
            if t <= e + 1e-12:
                if t >= s - 1e-12:
                    return j, j, 1.0, 0.0
                # t lies in the swing between hold j-1 and hold j
                prev_end = self.holds[j - 1][1]
                sigma = swing_blend((t - prev_end) / (s - prev_end))
                return j - 1, j, 1.0 - sigma, sigma
        return len(self.holds) - 1, len(self.holds) - 1, 1.0, 0.0


class FootPlan:
    """Full foot motion: geometry plus per-stance poses for every foot."""

    def __init__(self, schedule: ContactSchedule, geometries: Sequence[FootGeometry],
                 positions: Sequence[np.ndarray], orientations: Sequence[np.ndarray]):
        if len(geometries) != schedule.n_feet:
            raise ValueError("need one geometry per foot")
        self.schedule = schedule
        self.geometries = list(geometries)
        self.timelines = [FootTimeline(schedule, f) for f in range(schedule.n_feet)]
        self.positions = [np.asarray(p, dtype=float).reshape(-1, 2) for p in positions]
        self.orientations = [np.asarray(a, dtype=float).reshape(-1) for a in orientations]
        for f, tl in enumerate(self.timelines):
            if len(self.positions[f]) != tl.n_stances:
                raise ValueError(f"foot {f}: expected {tl.n_stances} stance positions, "
                                 f"got {len(self.positions[f])}")
            if len(self.orientations[f]) != tl.n_stances:
                raise ValueError(f"foot {f}: orientation count mismatch")

    @property
    def n_feet(self) -> int:
        return self.schedule.n_feet

    def stances(self, foot: int) -> list:
        return [Stance(self.positions[foot][j], self.orientations[foot][j], s, e)
                for j, (s, e) in enumerate(self.timelines[foot].holds)]

    def foot_pose(self, foot: int, t: float):
        """Ground-plane pose (p, alpha) of a foot at time t."""
        j0, j1, w0, w1 = self.timelines[foot].blend(t)
        p = w0 * self.positions[foot][j0] + w1 * self.positions[foot][j1]
        alpha = w0 * self.orientations[foot][j0] + w1 * self.orientations[foot][j1]
        return p, float(alpha)

    def world_vertices_at(self, foot: int, t: float) -> np.ndarray:
        p, alpha = self.foot_pose(foot, t)
        return world_vertices(p, alpha, self.geometries[foot])
