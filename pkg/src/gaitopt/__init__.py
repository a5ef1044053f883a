"""Trajectory optimization for legged locomotion with vertex-based support areas."""

from .feet import FootGeometry, FootPlan, Stance, world_vertices
from .gait import ContactSchedule, Phase, build_gait, concat
from .lip import (PendulumParams, PendulumState, analytic_solution,
                  capture_point, com_acceleration, simulate)
from .loads import LoadProfile, convexity_residuals, cop, lambda_target, robustness_cost
from .motion import Motion
from .nlp import AssembledProblem, BoundaryConditions, assemble
from .solver import Solution, SolverOptions, solve
from .spline import ComSpline, QuarticPoly2D, build_segmentation
from .verify import VerificationReport, check_solution, finite_diff_jacobian, hull_containment

__version__ = "0.1.0"

__all__ = [
    "AssembledProblem", "BoundaryConditions", "ComSpline", "ContactSchedule",
    "FootGeometry", "FootPlan", "LoadProfile", "Motion", "PendulumParams",
    "PendulumState", "Phase", "QuarticPoly2D", "Solution", "SolverOptions",
    "Stance", "VerificationReport", "analytic_solution", "assemble",
    "build_gait", "build_segmentation", "capture_point", "check_solution",
    "com_acceleration", "concat", "convexity_residuals", "cop",
    "finite_diff_jacobian", "hull_containment", "lambda_target",
    "robustness_cost", "simulate", "solve", "world_vertices",
]
