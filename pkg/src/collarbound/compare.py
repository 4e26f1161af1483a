"""Validators that turn the comparison theorems into pass/fail reports.

Each validator measures one quantity on a catalog space, evaluates the
closed-form bound, and hands both to :func:`collarbound.reports.judge`.
Spaces flagged ``hypothesis_violated`` turn failures into control verdicts.
"""

from __future__ import annotations

import math
import time

import numpy as np
from scipy.optimize import minimize

from .closed_forms import model_inradius, model_warp_integral
from .convexity import boundary_convexity_check, hessian_comparison_check
from .errors import DepthOutOfRange, ParameterError, UnsupportedOperation
from .flow import analytic_flow_time, flow_times, profile_for, transport
from .measure import (
    MeasureEstimate,
    Method,
    area_profile,
    boundary_area,
    lipschitz_image_bound_check,
    volume,
)
from .reports import Claim, Verdict, make_report
from .spaces import (
    BASE_ANGLE,
    CLOSED_FORM_FLOW,
    DISTANCE,
    FLOW,
    MONTE_CARLO,
    sample_boundary,
    sample_interior,
)
from .tolerances import tol


def _k():
    return tol("sigma_multiplier")


def _measure_method(space):
    return "monte_carlo" if space.supports(MONTE_CARLO) else "analytic"


def _check_depth(space, r):
    hi = model_inradius(space.kappa)
    if not 0 < r <= hi + 1e-15:
        raise DepthOutOfRange(f"collar depth must lie in (0, {hi:g}], got {r}")


def model_collar_volume(kappa, n, A0, r):
    """Comparison collar volume A(0) * integral of w(t)^(n-1) over [0, r]."""
    return A0 * model_warp_integral(kappa, n - 1, 0.0, r)


# ---------------------------------------------------------------------------
# Volume claims
# ---------------------------------------------------------------------------

def check_collar_volume(space, r, samples=10**6, seed=0, method=None):
    """vol(B(boundary, r)) <= A(0) * integral_0^r w(t)^(n-1) dt."""
    _check_depth(space, r)
    method = method or _measure_method(space)
    measured = volume(space, "collar", samples, seed, r=r, method=method)
    A0 = boundary_area(space)
    integral = model_warp_integral(space.kappa, space.dimension - 1, 0.0, r)
    bound = A0.value * integral
    stat = _k() * measured.std_error
    det = tol("analytic_rel") * bound + _k() * A0.std_error * integral
    return make_report(Claim.COLLAR_VOLUME, space, {"r": float(r)}, bound, measured.value,
                       measured.std_error, stat, det, "le",
                       details={"method": measured.method.value, "samples": measured.samples,
                                "boundary_area": A0.value, "boundary_method": A0.method.value})


def check_cone_volume(space, samples=10**6, seed=0, method=None):
    """vol(X) <= vol(Cone_0^1(boundary)) or vol(Cone_1^{pi/2}(boundary))."""
    method = method or _measure_method(space)
    measured = volume(space, "whole", samples, seed, method=method)
    A0 = boundary_area(space)
    integral = model_warp_integral(space.kappa, space.dimension - 1, 0.0, model_inradius(space.kappa))
    bound = A0.value * integral
    stat = _k() * measured.std_error
    det = tol("analytic_rel") * bound + _k() * A0.std_error * integral
    return make_report(Claim.CONE_VOLUME, space, {}, bound, measured.value, measured.std_error,
                       stat, det, "le", details={"method": measured.method.value})


def check_level_area(space, T, samples=10**6, seed=0, method=None):
    """A(T) <= L^(n-1) A(0) with L = 1 - T or cos(T), via the Lipschitz image bound."""
    a = space.inradius
    if T <= 0 or (a is not None and T >= a):
        raise ParameterError(f"level {T} must lie in (0, {a})")
    method = method or _measure_method(space)
    A0 = boundary_area(space)
    if method == "monte_carlo":
        h = 0.02 * (a or 1.0)
        grid = [T - h, T, T + h] if T >= h else [T, T + h, T + 2 * h]
        if a is not None and grid[-1] >= a:
            grid = [T - 2 * h, T - h, T]
        prof = area_profile(space, grid, samples, seed, method="monte_carlo")
        j = grid.index(T)
        image = MeasureEstimate(float(prof.area[j]), float(prof.std_error[j]), samples,
                                Method.COAREA, seed)
    else:
        image = MeasureEstimate(space.level_area_exact(T), 0.0, 0, Method.ANALYTIC)
    L = 1.0 - T if space.kappa == 0 else math.cos(T)
    rep = lipschitz_image_bound_check(L, A0, image, space.dimension - 1, space, {"T": float(T)})
    rep.details["method"] = image.method.value
    return rep


# ---------------------------------------------------------------------------
# Inradius
# ---------------------------------------------------------------------------

def measured_inradius(space, samples=20000, seed=0, starts=8):
    """Max of rho over interior samples, polished by Nelder-Mead from the best ones."""
    if not space.supports(MONTE_CARLO):
        if space.inradius is None:
            raise UnsupportedOperation(f"no inradius estimate for {space.describe()}")
        return float(space.inradius), "analytic"
    X = sample_interior(space, samples, seed)
    r = space.rho_batch(X)
    best = float(r.max())
    spherical = space.metric == "sphere"

    def neg_rho(z):
        y = z / np.linalg.norm(z) if spherical else z
        y = y[None, :]
        if not space.contains(y)[0]:
            return -float(space.signed_rho(y)[0])
        return -float(space.rho_batch(y)[0])

    for i in np.argsort(r)[::-1][:starts]:
        res = minimize(neg_rho, X[i], method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000})
        best = max(best, -float(res.fun))
    return best, "sampled+refined"


def check_inradius(space, samples=20000, seed=0):
    """inrad <= 1 (kappa = 0) or pi/2 (kappa = 1)."""
    measured, how = measured_inradius(space, samples, seed)
    bound = model_inradius(space.kappa)
    return make_report(Claim.INRADIUS, space, {"samples": samples}, bound, measured, 0.0, 0.0,
                       tol("inradius"), "le",
                       details={"method": how, "inradius_hint": space.inradius})


# ---------------------------------------------------------------------------
# Flow claims
# ---------------------------------------------------------------------------

def _require_flow(space):
    space.require(DISTANCE, "distances")
    if not (space.supports(FLOW) or space.supports(CLOSED_FORM_FLOW)):
        raise UnsupportedOperation(f"{space.describe()} has no gradient flow")


def boundary_pairs(space, pair_count, seed):
    """Random boundary pairs plus nearest-neighbour pairs (where the sup ratio lives)."""
    m = 2 * pair_count
    P = sample_boundary(space, m, seed)
    i = np.arange(0, m, 2)
    j = i + 1
    half = max(1, pair_count // 2)
    src = np.arange(half)
    D = space.dist(np.repeat(P[src], m, axis=0), np.tile(P, (half, 1))).reshape(half, m)
    D[src, src] = np.inf
    nn = D.argmin(axis=1)
    return P, np.concatenate([i, src]), np.concatenate([j, nn])


def model_distance(kappa, t, d0):
    """Distance at level t of two boundary points d0 apart in the warped-product model."""
    if kappa == 0:
        return (1.0 - t) * d0
    c = np.sin(t) ** 2 + np.cos(t) ** 2 * np.cos(d0)
    return np.arccos(np.clip(c, -1.0, 1.0))


def contraction_ratios(space, T, pair_count=1000, seed=0, step=None):
    _require_flow(space)
    P, i, j = boundary_pairs(space, pair_count, seed)
    d0 = space.dist(P[i], P[j])
    keep = d0 > 1e-9
    Q = transport(space, P, [T], step=step).points[:, 0]
    d1 = space.dist(Q[i], Q[j])
    return d0[keep], d1[keep] / d0[keep], (P, i[keep], j[keep])


def check_contraction(space, T, pair_count=1000, seed=0, step=None):
    """max d(Psi^T p, Psi^T q) / d(p, q) <= 1 - T (kappa = 0) or cos(T) (kappa = 1)."""
    a = space.inradius
    if T <= 0 or (a is not None and T >= a):
        raise ParameterError(f"T must lie in (0, {a})")
    d0, ratio, _ = contraction_ratios(space, T, pair_count, seed, step)
    factor = 1.0 - T if space.kappa == 0 else math.cos(T)
    k = int(ratio.argmax())
    return make_report(Claim.CONTRACTION, space, {"T": float(T), "pairs": len(ratio)}, factor,
                       float(ratio[k]), 0.0, 0.0, tol("contraction_rel") * factor, "le",
                       details={"min_ratio": float(ratio.min()), "argmax_distance": float(d0[k])})


def check_flow_time(space, T, point_count=200, seed=0, profile=None, step=None):
    """min over boundary samples of the F-flow time equals the footpoint time; none beats it."""
    profile = profile or profile_for(space.kappa)
    bound = analytic_flow_time(profile, T) if T > 0 else 0.0
    if T == 0:
        times = np.zeros(point_count)
        degenerate = np.zeros(point_count, dtype=bool)
    else:
        _require_flow(space)
        P = sample_boundary(space, point_count, seed)
        times, degenerate = flow_times(space, profile, P, T, step=step)
    measured = float(times.min())
    excess = times - bound
    return make_report(Claim.FLOW_TIME, space, {"T": float(T), "points": point_count,
                                                "profile": profile.name},
                       bound, measured, 0.0, 0.0, tol("flow_time"), "ge",
                       details={"above_by_1e-3": int((excess > 1e-3).sum()),
                                "max_excess": float(excess.max()),
                                "degenerate": int(degenerate.sum())})


# ---------------------------------------------------------------------------
# Rigidity
# ---------------------------------------------------------------------------

def rigidity_residual(space, r, pair_count=200, t_grid=None, seed=0, step=None):
    """Max relative deviation of level distances from the warped-product model."""
    _require_flow(space)
    a = space.inradius
    top = min(r, a * (1 - 1e-3)) if a is not None else r
    t_grid = np.linspace(0.0, top, 7)[1:] if t_grid is None else np.asarray(t_grid, dtype=float)
    P, i, j = boundary_pairs(space, pair_count, seed)
    d0 = space.dist(P[i], P[j])
    keep = d0 > 1e-9
    i, j, d0 = i[keep], j[keep], d0[keep]
    res = transport(space, P, t_grid, step=step)
    worst = 0.0
    for col, t in enumerate(t_grid):
        Q = res.points[:, col]
        d = space.dist(Q[i], Q[j])
        model = model_distance(space.kappa, t, d0)
        worst = max(worst, float(np.max(np.abs(d - model) / model)))
    return worst, t_grid


def detect_rigidity(space, r, pair_count=200, t_grid=None, seed=0, samples=10**6, step=None):
    """Warped-product fingerprint: collar equality together with exact level scaling.

    pass-at-equality when both hold (rigid), pass when neither holds, fail when
    the two disagree.
    """
    collar = check_collar_volume(space, r, samples, seed)
    residual, grid = rigidity_residual(space, r, pair_count, t_grid, seed + 1, step)
    equal = collar.verdict is Verdict.PASS_AT_EQUALITY
    scaled = residual <= tol("rigidity_rel")
    if equal and scaled:
        verdict = Verdict.PASS_AT_EQUALITY
    elif not equal and not scaled:
        verdict = Verdict.PASS
    else:
        verdict = Verdict.FAIL
    return make_report(Claim.RIGIDITY, space, {"r": float(r), "pairs": pair_count}, tol("rigidity_rel"),
                       residual, 0.0, 0.0, 0.0, "le", verdict=verdict,
                       details={"rigid": bool(equal and scaled), "collar_equality": equal,
                                "collar_verdict": collar.verdict.value,
                                "levels": [float(t) for t in grid]})


# ---------------------------------------------------------------------------
# Suite
# ---------------------------------------------------------------------------

ALL_CLAIMS = [c.value for c in Claim]


def default_parameters(space):
    """Claim parameters used when a caller does not supply them."""
    a = space.inradius or model_inradius(space.kappa)
    if space.kappa == 0:
        r, T = 0.5, 0.3
    else:
        r, T = math.pi / 4, math.pi / 3
    T = min(T, 0.5 * a)
    return {"r": min(r, model_inradius(space.kappa)), "T": T, "t_grid": [0.5 * T, T],
            "samples": 10**6, "pairs": 500, "points": 100, "base_angle_points": 8}


def _applicable(space, claim):
    flowable = space.supports(DISTANCE) and (space.supports(FLOW) or space.supports(CLOSED_FORM_FLOW))
    if claim in (Claim.CONTRACTION.value, Claim.FLOW_TIME.value, Claim.RIGIDITY.value):
        return flowable
    if claim in (Claim.BOUNDARY_CONVEXITY.value, Claim.HESSIAN_COMPARISON.value):
        return space.supports(BASE_ANGLE)
    return True


def _timed(fn, *args, **kwargs):
    start = time.perf_counter()
    out = fn(*args, **kwargs)
    elapsed = time.perf_counter() - start
    for rep in out if isinstance(out, list) else [out]:
        rep.runtime = elapsed
    return out


def validate(space, claims="all", params=None, seed=0):
    """Run the selected claims on ``space``; returns (reports, skipped claim names)."""
    p = default_parameters(space)
    p.update(params or {})
    if claims in ("all", None):
        wanted = [c for c in ALL_CLAIMS if _applicable(space, c)]
        skipped = [c for c in ALL_CLAIMS if c not in wanted]
    else:
        wanted = list(claims)
        for c in wanted:
            if c not in ALL_CLAIMS:
                raise ParameterError(f"unknown claim {c!r}; expected one of {ALL_CLAIMS}")
            if not _applicable(space, c):
                raise UnsupportedOperation(f"claim {c} does not apply to {space.describe()}")
        skipped = []
    reports = []
    for c in wanted:
        if c == "collar_volume":
            reports.append(_timed(check_collar_volume, space, p["r"], p["samples"], seed))
        elif c == "cone_volume":
            reports.append(_timed(check_cone_volume, space, p["samples"], seed))
        elif c == "inradius":
            reports.append(_timed(check_inradius, space, 20000, seed))
        elif c == "level_area":
            reports.append(_timed(check_level_area, space, p["T"], p["samples"], seed))
        elif c == "contraction":
            reports.append(_timed(check_contraction, space, p["T"], p["pairs"], seed))
        elif c == "flow_time":
            reports.append(_timed(check_flow_time, space, p["T"], p["points"], seed))
        elif c == "rigidity":
            reports.append(_timed(detect_rigidity, space, p["r"], p["pairs"] // 2, None, seed,
                                  p["samples"]))
        elif c == "boundary_convexity":
            reports.append(_timed(boundary_convexity_check, space, p["base_angle_points"], seed))
        elif c == "hessian_comparison":
            reports.extend(_timed(hessian_comparison_check, space, p["t_grid"],
                                  p["base_angle_points"], seed))
    return reports, skipped
