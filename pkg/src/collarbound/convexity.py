"""Base-angle convexity of boundaries and level sets from chord geometry.

For a point p on G(t), seen as the boundary of the superlevel set Omega^t, a
chord of length r leaves p in the plane spanned by a tangent direction tau and
the inward normal nu. Its direction makes an angle beta with the tangent plane,
and beta is fixed by asking the chord endpoint exp_p(r (cos beta tau +
sin beta nu)) to lie on G(t) again. The base angle is liminf 2 beta / r; it is
estimated at the smallest radius of a schedule once consecutive radii agree.

All catalog superlevel sets are geodesically convex, so chords are straight
segments (Euclidean kinds) or great-circle arcs (caps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ChordSolverFailure, DomainError, ParameterError, ResolutionFloor
from .reports import make_report
from .spaces import BASE_ANGLE, rho, sample_boundary, sample_level_set
from .tolerances import tol

DEFAULT_RADII = (0.08, 0.04, 0.02, 0.01, 0.005)


def comparison_bound(kappa, t):
    """Lower bound for BA(Omega^t, G(t)): 1/(1-t) when kappa = 0, tan(t) when kappa = 1."""
    if kappa == 0:
        if not 0 <= t < 1:
            raise DomainError(f"level {t} outside [0, 1)")
        return 1.0 / (1.0 - t)
    if not 0 <= t < math.pi / 2:
        raise DomainError(f"level {t} outside [0, pi/2)")
    return math.tan(t)


def concavity_modulus(profile_kind, t):
    """M0(t) = -1/(1-t) for kappa0, M1(t) = -tan(t) for kappa1."""
    kind = str(profile_kind).lower()
    if kind in ("kappa0", "0"):
        return -comparison_bound(0, t)
    if kind in ("kappa1", "1"):
        return -comparison_bound(1, t)
    raise ParameterError(f"unknown profile kind {profile_kind!r}")


@dataclass
class BaseAngleEstimate:
    point: np.ndarray
    level: float
    r_schedule: np.ndarray
    per_r_min: np.ndarray
    per_r_mean: np.ndarray
    estimate: float
    mean: float
    spread: float
    resolution: float

    @property
    def liminf_proxy(self):
        return self.estimate


def _check_schedule(r):
    r = np.asarray(r, dtype=float)
    if r.ndim != 1 or len(r) < 2 or (np.diff(r) >= 0).any():
        raise ParameterError("r schedule needs >= 2 strictly decreasing radii")
    if r[-1] < tol("chord_floor"):
        raise ParameterError("r schedule bottoms out below the chord resolution floor")
    return r


def _directions(space, p, nu, count, seed):
    basis = space.tangent_basis(p, nu)
    rng = np.random.default_rng(seed)
    half = max(1, count // 2)
    if len(basis) == 1:
        coeffs = np.ones((half, 1))
    else:
        coeffs = rng.standard_normal((half, len(basis)))
        coeffs /= np.linalg.norm(coeffs, axis=1, keepdims=True)
    tau = coeffs @ basis
    return np.vstack([tau, -tau])


def chord_angles(space, p, nu, tau, radii, level):
    """Angle beta of each chord (radius x direction) whose endpoint lies on G(level)."""
    R = np.repeat(radii, len(tau))
    Tau = np.tile(tau, (len(radii), 1))
    P = np.broadcast_to(p, Tau.shape)
    Nu = np.broadcast_to(nu, Tau.shape)

    def h(beta):
        V = R[:, None] * (np.cos(beta)[:, None] * Tau + np.sin(beta)[:, None] * Nu)
        return space.signed_rho(space.exp(P, V)) - level

    lo = np.zeros(len(R))
    hi = np.full(len(R), math.pi / 2)
    h_lo, h_hi = h(lo), h(hi)
    if (h_hi <= 0).any():
        raise ChordSolverFailure("normal chord leaves the region; radius too large")
    flat = h_lo >= 0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        hm = h(mid)
        inside = hm >= 0
        hi = np.where(inside, mid, hi)
        lo = np.where(inside, lo, mid)
    beta = np.where(flat, 0.0, 0.5 * (lo + hi))
    return beta.reshape(len(radii), len(tau))


def base_angle(space, p, r_schedule=DEFAULT_RADII, directions=16, seed=0, level=0.0):
    """Base-angle estimate at p on G(level) as the boundary of Omega^level.

    Returns the minimum over chord directions of 2 beta / r at the smallest
    radius, which must agree with the previous radius to 2% (or to the
    absolute floor when the estimate is near zero).
    """
    space.require(BASE_ANGLE, "base angles")
    r = _check_schedule(r_schedule)
    p = np.asarray(p, dtype=float)
    value = rho(space, p)
    if abs(value - level) > 1e-6:
        raise ParameterError(f"point has rho = {value:.6g}, not on G({level:g})")
    nu = space.level_normal(p[None, :], level)[0]
    tau = _directions(space, p, nu, directions, seed)
    est = 2.0 * chord_angles(space, p, nu, tau, r, level) / r[:, None]
    mins, means = est.min(axis=1), est.mean(axis=1)
    delta = abs(mins[-1] - mins[-2])
    allowed = max(tol("base_angle_stabilization") * abs(mins[-1]), tol("base_angle_abs"))
    if delta > allowed:
        raise ResolutionFloor(f"base angle not stabilized: {mins[-2]:.6g} vs {mins[-1]:.6g}")
    return BaseAngleEstimate(p, float(level), r, mins, means, float(mins[-1]), float(means[-1]),
                             float(est[-1].max() - est[-1].min()), float(delta))


def level_base_angles(space, t, count=8, seed=0, r_schedule=DEFAULT_RADII, directions=16):
    """Estimates at ``count`` sampled points of G(t) (the boundary when t = 0)."""
    P = sample_boundary(space, count, seed) if t == 0 else sample_level_set(space, t, count, seed)
    return [base_angle(space, x, r_schedule, directions, seed + i, t) for i, x in enumerate(P)]


def level_report(space, t, estimates, claim):
    bound = comparison_bound(space.kappa, t)
    measured = min(e.estimate for e in estimates)
    resolution = max(e.resolution for e in estimates)
    det = tol("base_angle_rel") * bound + resolution
    return make_report(claim, space, {"t": float(t), "points": len(estimates)}, bound, measured,
                       resolution, 0.0, det, "ge",
                       details={"mean": float(np.mean([e.mean for e in estimates])),
                                "max": float(max(e.estimate for e in estimates))})


def hessian_comparison_check(space, t_grid, points=8, seed=0, r_schedule=DEFAULT_RADII,
                             directions=16):
    """Per level t: min sampled base angle of G(t) against 1/(1-t) or tan(t)."""
    reports = []
    a = space.inradius
    for i, t in enumerate(t_grid):
        if t <= 0 or (a is not None and t >= a):
            raise ParameterError(f"level {t} must lie in (0, {a})")
        est = level_base_angles(space, t, points, seed + 1000 * i, r_schedule, directions)
        reports.append(level_report(space, t, est, "hessian_comparison"))
    return reports


def boundary_convexity_check(space, points=16, seed=0, r_schedule=DEFAULT_RADII, directions=16):
    """Boundary base angle against 1 (kappa = 0) or 0 (kappa = 1)."""
    est = level_base_angles(space, 0.0, points, seed, r_schedule, directions)
    return level_report(space, 0.0, est, "boundary_convexity")


@dataclass
class ChordExpansionReport:
    M: float
    s: np.ndarray
    theta: np.ndarray
    ratio: np.ndarray
    taylor_ratio: np.ndarray
    chord: np.ndarray
    expected: float
    passed: bool


def chord_expansion_selftest(M, s_schedule=(0.1, 0.05, 0.02, 0.01, 0.001)):
    """Chord-angle expansion on the round model with concavity modulus M.

    The model is a circle of radius 1/|M|. A chord of length s leaves the
    tangent at angle theta(s) = arcsin(s|M|/2); the expansion of
    arccos(1 - M^2 s^2 / 8) gives the same first-order term, so both ratios
    theta/s must approach |M|/2. The third column of the report is the chord
    length 2 s sin(theta/2) = sqrt(2 s^2 - 2 s^2 cos(theta)).
    """
    if M > 0:
        raise ParameterError("modulus of concavity must be <= 0")
    s = np.asarray(s_schedule, dtype=float)
    if (s <= 0).any() or (np.diff(s) >= 0).any():
        raise ParameterError("s schedule must be positive and strictly decreasing")
    k = abs(M)
    theta = np.arcsin(np.minimum(s * k / 2.0, 1.0))
    taylor = np.arccos(1.0 - (M * s) ** 2 / 8.0)
    chord = np.sqrt(2 * s**2 - 2 * s**2 * np.cos(theta))
    expected = k / 2.0
    ratio, tratio = theta / s, taylor / s
    if k == 0:
        passed = bool(abs(ratio[-1]) <= 1e-12 and abs(tratio[-1]) <= 1e-12)
    else:
        band = tol("base_angle_rel") * expected
        passed = bool(abs(ratio[-1] - expected) <= band and abs(tratio[-1] - expected) <= band)
    return ChordExpansionReport(float(M), s, theta, ratio, tratio, chord, expected, passed)
