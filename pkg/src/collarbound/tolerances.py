"""Tolerance ladder.

Every numeric threshold used by the validators lives here. Each entry can be
overridden through an environment variable ``COLLARBOUND_TOL_<NAME>`` (upper
case), read at lookup time.
"""

from __future__ import annotations

import os

DEFAULTS = {
    # footpoint solver
    "projection": 1e-10,
    "projection_max_iter": 100,
    "medial_separation": 1e-6,
    "medial_rho": 1e-8,
    "chart": 1e-12,
    # flow integrator
    "step_fraction": 1e-3,
    "step_deviation": 0.1,
    "level_match": 1e-12,
    "min_step": 1e-10,
    "soul": 1e-9,
    "ridge": 1e-8,
    # comparison slack
    "sigma_multiplier": 3.0,
    "analytic_rel": 1e-10,
    "contraction_rel": 1e-3,
    "rigidity_rel": 1e-3,
    "flow_time": 1e-4,
    "inradius": 1e-3,
    "base_angle_rel": 0.05,
    "base_angle_abs": 0.01,
    "base_angle_stabilization": 0.02,
    "chord_floor": 1e-6,
    "packing_band": 0.15,
    "curvature_audit": 1e-6,
    "rejection_floor": 1e-6,
}


def tol(name):
    """Return the tolerance ``name``, honouring environment overrides."""
    if name not in DEFAULTS:
        raise KeyError(f"unknown tolerance {name!r}")
    raw = os.environ.get(f"COLLARBOUND_TOL_{name.upper()}")
    default = DEFAULTS[name]
    if raw is None:
        return default
    return type(default)(float(raw))


def ladder():
    """Current values of every tolerance, overrides applied."""
    return {name: tol(name) for name in DEFAULTS}
