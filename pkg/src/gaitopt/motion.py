"""Decoded optimizer output: everything needed to evaluate a planned motion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .feet import FootPlan
from .gait import ContactSchedule
from .lip import PendulumParams
from .loads import LoadProfile, cop as _cop
from .spline import ComSpline


@dataclass
class Motion:
    """CoM spline, foot plan and load profile of one solved scenario."""

    spline: ComSpline
    plan: FootPlan
    loads: LoadProfile
    schedule: ContactSchedule
    params: PendulumParams
    nominal_stance: np.ndarray     # (n_feet, 2)
    rom_half_extents: np.ndarray   # (2,)

    def cop(self, t: float) -> np.ndarray:
        return _cop(self.loads, self.plan, t)

    @property
    def T(self) -> float:
        return self.schedule.T
