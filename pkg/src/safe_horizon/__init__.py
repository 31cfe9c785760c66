"""Guaranteed-safe open-loop time horizons for differential-drive robot fleets."""
from .ellipse import T_STAR, HorizonEllipse, Pose, ellipse_membership, min_ellipse_params
from .errors import ConfigError, DomainError, WireFormatError
from .geometry import alpha, hull_boundary_point, jaccard_nested, kset_contains
from .horizon import (
    STOP,
    Obstacle,
    SafeTimeResult,
    SolverOptions,
    UnitScale,
    VelocityCommand,
    fleet_horizons,
    neighbors,
    open_loop_position,
    pairwise_safe_time,
    safe_horizon,
)

__version__ = "0.1.0"
