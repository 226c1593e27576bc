"""Boundary curves, increasing domain families, and the built-in scenarios."""

from .area import area_wrt
from .curve import BoundaryCurve, hausdorff_distance, winding_numbers
from .diffeos import DiffeoMap, QuadraticShear, RadialPetal, Rotation, make_diffeo
from .family import DomainFamily, TangencyFamily, chebyshev_grid
from .scenarios import (
    DiffeoScenario,
    StandardScenario,
    TangencyScenario,
    ball_radius,
    ball_radius_rate,
    diffeo_flow,
    exit_time,
    make_scenario,
    normal_velocity,
    standard_exit_time,
    standard_flow,
    standard_kappa,
    tangency_flow,
)
from .tangency import PinchSpec, TangencyTemplate

__all__ = [
    "BoundaryCurve", "DomainFamily", "TangencyFamily", "PinchSpec",
    "TangencyTemplate", "DiffeoMap", "Rotation", "RadialPetal", "QuadraticShear",
    "StandardScenario", "DiffeoScenario", "TangencyScenario",
    "standard_flow", "diffeo_flow", "tangency_flow", "normal_velocity",
    "exit_time", "area_wrt", "make_scenario", "make_diffeo", "ball_radius",
    "ball_radius_rate", "standard_exit_time", "standard_kappa",
    "chebyshev_grid", "hausdorff_distance", "winding_numbers",
]
