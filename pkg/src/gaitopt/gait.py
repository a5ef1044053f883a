"""Contact schedules: which feet are on the ground when.

A schedule is an ordered list of phases, each with a duration and one
boolean contact flag per foot. The schedule is fixed before optimization;
swapping it out is what turns the same optimizer into a walk, trot, pace,
bound or biped-walk generator.

Conventions: quadruped feet are ordered (LF, RF, LH, RH); x points forward
and y to the left. Contact flags are right-continuous in time, so a query
exactly at a phase boundary returns the incoming phase.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

QUADRUPED_FEET = ("LF", "RF", "LH", "RH")
BIPED_FEET = ("L", "R")

GAIT_KINDS = ("walk", "trot", "pace", "bound", "biped_walk")

# Swing groups per gait, as label sets, in firing order.
_SWING_ORDER = {
    "walk": ({"LH"}, {"LF"}, {"RH"}, {"RF"}),
    "trot": ({"RF", "LH"}, {"LF", "RH"}),
    "pace": ({"LF", "LH"}, {"RF", "RH"}),
    "bound": ({"LF", "RF"}, {"LH", "RH"}),
    "biped_walk": ({"L"}, {"R"}),
}

# Gaits that need an all-stance transition between consecutive swing
# phases (their swing groups leave only a line or a single side loaded).
_NEEDS_TRANSITION = {"pace", "bound", "biped_walk"}


@dataclass(frozen=True)
class Phase:
    """One schedule segment: duration plus per-foot contact flags."""

    duration: float
    in_contact: tuple

    def __post_init__(self):
        object.__setattr__(self, "in_contact", tuple(bool(b) for b in self.in_contact))
        if not self.duration > 0:
            raise ValueError(f"phase duration must be positive, got {self.duration}")
        if not any(self.in_contact):
            raise ValueError("at least one foot must be in contact in every phase")


class ContactSchedule:
    """Immutable sequence of phases covering [0, T] for a fixed foot set."""

    def __init__(self, feet: Sequence[str], phases: Iterable[Phase]):
        self.feet = tuple(feet)
        if len(set(self.feet)) != len(self.feet):
            raise ValueError("foot labels must be unique")
        self.phases = tuple(phases)
        if not self.phases:
            raise ValueError("schedule needs at least one phase")
        for ph in self.phases:
            if len(ph.in_contact) != len(self.feet):
                raise ValueError("phase flag width does not match foot count")
        self.boundaries = np.concatenate(
            [[0.0], np.cumsum([ph.duration for ph in self.phases])])

    @property
    def T(self) -> float:
        return float(self.boundaries[-1])

    @property
    def n_feet(self) -> int:
        return len(self.feet)

    def foot_index(self, label: str) -> int:
        return self.feet.index(label)

    def phase_index(self, t: float) -> int:
        if t < -1e-12 or t > self.T + 1e-12:
            raise ValueError(f"t={t} outside schedule horizon [0, {self.T}]")
        idx = int(np.searchsorted(self.boundaries, t, side="right")) - 1
        return min(max(idx, 0), len(self.phases) - 1)

    def contact_flags(self, t: float) -> tuple:
        """Per-foot contact flags at time t (right-continuous at boundaries)."""
        return self.phases[self.phase_index(t)].in_contact

    def contact_intervals(self, foot: int) -> list:
        """Maximal [start, end] intervals during which ``foot`` is in contact.

        A degenerate interval is prepended (appended) when the schedule
        starts (ends) with the foot mid-swing, so that every swing always
        has enclosing stances; their positions are still decision values.
        """
        intervals = []
        cur = None
        for i, ph in enumerate(self.phases):
            if ph.in_contact[foot]:
                if cur is None:
                    cur = [self.boundaries[i], self.boundaries[i + 1]]
                else:
                    cur[1] = self.boundaries[i + 1]
            else:
                if cur is not None:
                    intervals.append(tuple(cur))
                    cur = None
        if cur is not None:
            intervals.append(tuple(cur))
        if not self.phases[0].in_contact[foot]:
            intervals.insert(0, (0.0, 0.0))
        if not self.phases[-1].in_contact[foot]:
            intervals.append((self.T, self.T))
        return intervals

    def step_count(self, foot: int) -> int:
        """Number of swing intervals (= steps taken) of ``foot``."""
        return len(self.contact_intervals(foot)) - 1

    def __eq__(self, other):
        return (isinstance(other, ContactSchedule)
                and self.feet == other.feet and self.phases == other.phases)

    def __repr__(self):
        return (f"ContactSchedule(feet={self.feet}, n_phases={len(self.phases)}, "
                f"T={self.T:.3f})")


def _flags(feet, swinging) -> tuple:
    return tuple(label not in swinging for label in feet)


def build_gait(kind: str, n_steps: int, swing_duration: float = 0.3,
               stance_duration: float = 0.1, lead_in: float = 0.4,
               lead_out: float = 0.4) -> ContactSchedule:
    """Standard gait builder.

    ``n_steps`` counts swing phases. Walk swings one leg at a time in the
    order LH, LF, RH, RF; trot alternates diagonal pairs starting with
    {RF, LH}; pace alternates left/right pairs and bound front/hind pairs,
    both with an all-stance transition of ``stance_duration`` between
    consecutive swing phases; biped_walk alternates single legs with a
    double-support transition. ``lead_in`` / ``lead_out`` add all-stance
    phases at the ends and may be zero (phase omitted).
    """
    if kind not in GAIT_KINDS:
        raise ValueError(f"unknown gait kind {kind!r}, expected one of {GAIT_KINDS}")
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if swing_duration <= 0 or stance_duration <= 0:
        raise ValueError("phase durations must be positive")
    if lead_in < 0 or lead_out < 0:
        raise ValueError("lead_in/lead_out must be non-negative")

    feet = BIPED_FEET if kind == "biped_walk" else QUADRUPED_FEET
    all_stance = tuple(True for _ in feet)
    order = _SWING_ORDER[kind]

    phases = []
    if lead_in > 0:
        phases.append(Phase(lead_in, all_stance))
    for i in range(n_steps):
        phases.append(Phase(swing_duration, _flags(feet, order[i % len(order)])))
        if kind in _NEEDS_TRANSITION and i < n_steps - 1:
            phases.append(Phase(stance_duration, all_stance))
    if lead_out > 0:
        phases.append(Phase(lead_out, all_stance))
    return ContactSchedule(feet, phases)


def concat(a: ContactSchedule, b: ContactSchedule) -> ContactSchedule:
    """Concatenate two schedules over the same foot set."""
    if a.feet != b.feet:
        raise ValueError(f"foot sets differ: {a.feet} vs {b.feet}")
    return ContactSchedule(a.feet, a.phases + b.phases)
