"""Geometry of r-ball bodies: exact 2D arc-polygon kernel, dimension-generic
Monte-Carlo intrinsic-volume estimation, and numerical verification of the
associated convexity inequalities."""

from .errors import ConvergenceError, DomainError, FitError, StitchingError
from .geom import (
    Ball,
    IntrinsicVolumes,
    PointSet,
    ball_intrinsic_volume,
    diameter,
    min_enclosing_ball,
    min_pairwise_distance,
    omega,
    unit_ball_intrinsic_volume,
)

__all__ = [
    "Ball",
    "ConvergenceError",
    "DomainError",
    "FitError",
    "IntrinsicVolumes",
    "PointSet",
    "StitchingError",
    "ball_intrinsic_volume",
    "diameter",
    "min_enclosing_ball",
    "min_pairwise_distance",
    "omega",
    "unit_ball_intrinsic_volume",
]
