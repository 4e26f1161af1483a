"""Numerical checks of collar-volume, flow-contraction and base-angle comparison bounds.

The package instantiates convex model spaces (balls, convex bodies, spherical
caps, cones and warped-product collars), integrates gradient flows of the
distance to the boundary, and judges each comparison inequality with explicit
statistical and deterministic slack.
"""

from __future__ import annotations

from ._kernels import BACKEND
from .compare import ALL_CLAIMS, validate
from .convexity import base_angle, boundary_convexity_check, hessian_comparison_check
from .errors import CollarBoundError, ConfigError
from .flow import (
    f_gradient_curve,
    flow_time,
    sharafutdinov_flow,
    sharafutdinov_retraction,
)
from .measure import MeasureEstimate, area_profile, boundary_area, rough_volume, volume
from .reports import ComparisonReport, Verdict
from .spaces import (
    Ellipsoid,
    EuclideanBall,
    ImplicitBody,
    SphericalCap,
    SquareControl,
    load_space,
    make_cone,
    make_warped_collar,
    rho,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_CLAIMS",
    "BACKEND",
    "CollarBoundError",
    "ComparisonReport",
    "ConfigError",
    "Ellipsoid",
    "EuclideanBall",
    "ImplicitBody",
    "MeasureEstimate",
    "SphericalCap",
    "SquareControl",
    "Verdict",
    "area_profile",
    "base_angle",
    "boundary_area",
    "boundary_convexity_check",
    "f_gradient_curve",
    "flow_time",
    "hessian_comparison_check",
    "load_space",
    "make_cone",
    "make_warped_collar",
    "rho",
    "rough_volume",
    "sharafutdinov_flow",
    "sharafutdinov_retraction",
    "validate",
    "volume",
]
