"""Localization-call control for mobile sensors: mobility model, closed-form
error analysis, tracking protocols (MAINT, MADRD, SFR, DVM) and the Monte
Carlo experiments that compare them."""

__version__ = "0.1.0"

from .errors import (
    BracketError,
    DegeneratePairError,
    ParameterError,
    StaleQueryError,
    UnsupportedMomentError,
)
from .mobility import Leg, ModelParams, Trajectory, generate_trajectory, position_at, waypoint_count

__all__ = [
    "BracketError",
    "DegeneratePairError",
    "Leg",
    "ModelParams",
    "ParameterError",
    "StaleQueryError",
    "Trajectory",
    "UnsupportedMomentError",
    "generate_trajectory",
    "position_at",
    "waypoint_count",
    "__version__",
]
