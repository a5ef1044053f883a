"""Vertex loads: the convex-combination parametrization of the CoP.

Instead of optimizing CoP coordinates directly, each contact vertex of
each foot carries a load fraction in [0, 1]. The CoP is the load-weighted
sum of the world vertex positions; requiring the loads of each time node
to sum to one (and swinging feet to carry none) confines the CoP to the
convex hull of the feet in contact. Loads are piecewise constant in time,
one value vector per node.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .feet import FootGeometry, FootPlan
from .gait import ContactSchedule


def entry_offsets(geometries: Sequence[FootGeometry]) -> np.ndarray:
    """Start index of each foot's vertex block in a flat load vector."""
    return np.concatenate([[0], np.cumsum([g.n_vertices for g in geometries])])


class LoadProfile:
    """Piecewise-constant load fractions: values[i, e] on node interval i.

    Entries are flattened foot-major, vertex-minor. Node boundaries are
    shared with the schedule convention: lookups are right-continuous and
    t = T maps to the last node.
    """

    def __init__(self, node_bounds, values, geometries: Sequence[FootGeometry]):
        self.node_bounds = np.asarray(node_bounds, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.geometries = list(geometries)
        self.offsets = entry_offsets(self.geometries)
        if self.values.ndim != 2 or self.values.shape[0] != len(self.node_bounds) - 1:
            raise ValueError("values must be (n_nodes, n_entries)")
        if self.values.shape[1] != self.offsets[-1]:
            raise ValueError("entry count does not match geometries")

    @property
    def n_nodes(self) -> int:
        return self.values.shape[0]

    @property
    def n_entries(self) -> int:
        return self.values.shape[1]

    @property
    def T(self) -> float:
        return float(self.node_bounds[-1])

    def node_index(self, t: float) -> int:
        if t < -1e-12 or t > self.T + 1e-12:
            raise ValueError(f"t={t} outside horizon [0, {self.T}]")
        idx = int(np.searchsorted(self.node_bounds, t, side="right")) - 1
        return min(max(idx, 0), self.n_nodes - 1)

    def value_at(self, t: float) -> np.ndarray:
        return self.values[self.node_index(t)]

    def foot_slice(self, foot: int) -> slice:
        return slice(int(self.offsets[foot]), int(self.offsets[foot + 1]))


def cop(loads: LoadProfile, plan: FootPlan, t: float) -> np.ndarray:
    """Center of pressure: load-weighted sum of world vertex positions."""
    lam = loads.value_at(t)
    u = np.zeros(2)
    for f in range(plan.n_feet):
        verts = plan.world_vertices_at(f, t)
        u += lam[loads.foot_slice(f)] @ verts
    return u


def lambda_target(schedule: ContactSchedule, geometries: Sequence[FootGeometry],
                  t: float) -> np.ndarray:
    """Most robust load distribution at time t: equal over contact vertices."""
    flags = schedule.contact_flags(t)
    offsets = entry_offsets(geometries)
    n_contact_vertices = sum(g.n_vertices for g, c in zip(geometries, flags) if c)
    if n_contact_vertices == 0:
        raise ValueError(f"no foot in contact at t={t}")
    target = np.zeros(int(offsets[-1]))
    for f, (g, c) in enumerate(zip(geometries, flags)):
        if c:
            target[int(offsets[f]):int(offsets[f + 1])] = 1.0 / n_contact_vertices
    return target


def load_target(schedule: ContactSchedule, geometries: Sequence[FootGeometry],
                node_bounds) -> np.ndarray:
    """Per-node target profile, evaluated at each node's start time."""
    node_bounds = np.asarray(node_bounds, dtype=float)
    return np.array([lambda_target(schedule, geometries, t) for t in node_bounds[:-1]])


class ConvexityResiduals(NamedTuple):
    sum_residuals: np.ndarray      # (n_nodes,): sum(lambda_i) - 1
    lower_violation: np.ndarray    # (n_nodes, n_entries): max(-lambda, 0)
    upper_violation: np.ndarray    # (n_nodes, n_entries): max(lambda - contact, 0)


def convexity_residuals(loads: LoadProfile, schedule: ContactSchedule) -> ConvexityResiduals:
    """How far a load profile is from a valid convex combination.

    Per node: the unit-sum residual, plus violations of the bounds
    0 <= lambda <= contact_flag (a swinging foot must be fully unloaded).
    """
    upper = np.zeros_like(loads.values)
    for i in range(loads.n_nodes):
        flags = schedule.contact_flags(loads.node_bounds[i])
        for f in range(len(loads.geometries)):
            upper[i, loads.foot_slice(f)] = 1.0 if flags[f] else 0.0
    sums = loads.values.sum(axis=1) - 1.0
    lower_violation = np.maximum(-loads.values, 0.0)
    upper_violation = np.maximum(loads.values - upper, 0.0)
    return ConvexityResiduals(sums, lower_violation, upper_violation)


def robustness_cost(values: np.ndarray, target: np.ndarray):
    """Sum of squared deviations from the target loads, with gradient."""
    d = values - target
    return float(np.sum(d * d)), 2.0 * d
