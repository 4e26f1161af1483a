"""Gradient curves of the distance-to-boundary field.

Two parametrizations of the same curves are supported:

* Sharafutdinov: dx/ds = grad rho / |grad rho|^2, so rho rises by exactly s.
  The flow Psi^s carries the level set G(t) onto G(t + s).
* F-gradient: dx/dtau = grad F for F = f(rho) with a concavity profile f,
  so d rho / d tau = f'(rho) |grad rho|^2.

The integrator is level-synchronous: every step raises rho by a fixed amount.
Off the medial axis the gradient is constant along the normal segment, so an
Euler step along it lands exactly on the next level. A probe one step ahead
detects ridge crossings, where the semi-concave gradient is replaced by the
bisector of the two one-sided gradients with norm equal to half their sum.
Every step is corrected onto its target level by a secant iteration, and a
step whose measured rate deviates more than 10% from prediction is halved.
F-time is accumulated per step with the closed-form integral of 1/f' between
the two levels, divided by the squared effective gradient norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .errors import AtSoul, NonMonotone, ParameterError, StepCollapse
from .spaces import CLOSED_FORM_FLOW, FLOW, footpoints, rho
from .tolerances import tol

# ---------------------------------------------------------------------------
# Concavity profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConcavityProfile:
    """Reparametrizing function f with f' > 0 and its modulus of concavity phi.

    ``rise_time(a, b)`` is the closed-form integral of 1/f'(h) over [a, b]: the
    F-time a unit-speed gradient curve needs to climb from level a to level b.
    """

    name: str
    f: object
    fprime: object
    modulus: object
    rise_time: object
    domain: float

    def __post_init__(self):
        grid = np.linspace(0.0, self.domain, 1001)[:-1]
        if not (np.asarray(self.fprime(grid)) > 0).all():
            raise ParameterError(f"profile {self.name}: f' must be positive on [0, {self.domain:g})")

    def check_level(self, t):
        if not 0 <= t < self.domain:
            raise ParameterError(f"profile {self.name}: level {t} outside [0, {self.domain:g})")


def kappa0_profile():
    """f(rho) = -(1 - rho)^2 / 2, f' = 1 - rho, phi = -1."""
    return ConcavityProfile(
        name="kappa0",
        f=lambda r: -0.5 * (1.0 - np.asarray(r)) ** 2,
        fprime=lambda r: 1.0 - np.asarray(r),
        modulus=lambda t: -1.0 + 0.0 * np.asarray(t),
        rise_time=lambda a, b: np.log1p(-np.asarray(a)) - np.log1p(-np.asarray(b)),
        domain=1.0,
    )


def kappa1_profile():
    """f(rho) = sin(rho), f' = cos(rho), phi(t) = -sin(t)."""
    return ConcavityProfile(
        name="kappa1",
        f=lambda r: np.sin(r),
        fprime=lambda r: np.cos(r),
        modulus=lambda t: -np.sin(t),
        rise_time=lambda a, b: np.arctanh(np.sin(b)) - np.arctanh(np.sin(a)),
        domain=math.pi / 2,
    )


def profile_for(kind):
    """Profile by name (``kappa0``/``kappa1``) or curvature index (0/1)."""
    key = str(getattr(kind, "value", kind)).lower()
    if key in ("kappa0", "0", "nonnegative"):
        return kappa0_profile()
    if key in ("kappa1", "1", "atleastone"):
        return kappa1_profile()
    raise ParameterError(f"unknown profile {kind!r}")


def analytic_flow_time(profile, T):
    """F-time of a footpoint curve (|grad rho| = 1) from the boundary to level T."""
    profile.check_level(T)
    return float(profile.rise_time(0.0, T))


# ---------------------------------------------------------------------------
# Gradient of rho
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Gradient:
    direction: np.ndarray
    norm: float
    degenerate: bool
    footpoints: np.ndarray


def _min_norm_hull(U):
    """Minimum-norm point of the convex hull of the rows of U."""
    k = len(U)
    big = 1e3
    A = np.vstack([U.T, big * np.ones((1, k))])
    b = np.concatenate([np.zeros(U.shape[1]), [big]])
    w, _ = nnls(A, b)
    w = w / w.sum()
    return w @ U


def gradient_of_rho(space, x):
    """Unit ascent direction of rho at ``x`` and the gradient norm.

    At a medial point with footpoints p_i the one-sided gradients u_i point away
    from each p_i. The semi-concave gradient is the minimum-norm point of their
    convex hull; its direction maximizes the minimum angle to all footpoint
    directions, and its norm is the cosine of the half-spread (the bisector
    with norm cos(theta/2) for two footpoints).
    """
    x = np.asarray(x, dtype=float)
    value = rho(space, x)
    a = space.inradius
    if space.supports(CLOSED_FORM_FLOW):
        d = np.zeros_like(x)
        d[0] = -1.0
        if a is not None and value >= a - tol("soul"):
            raise AtSoul("cone apex reached")
        return Gradient(d, 1.0, False, space.footpoint_batch(x[None, :]))
    space.require(FLOW, "gradient flows")
    if a is not None and value >= a - tol("soul"):
        raise AtSoul(f"rho = {value:.12g} is the inradius")
    P = footpoints(space, x)
    U = space.ascent(np.broadcast_to(x, P.shape), P)
    if len(P) == 1:
        return Gradient(U[0], 1.0, False, P)
    v = _min_norm_hull(U)
    g = float(np.linalg.norm(v))
    if g < tol("soul"):
        raise AtSoul(f"gradient vanishes at {x}")
    return Gradient(v / g, g, True, P)


# ---------------------------------------------------------------------------
# Curves and batch transport
# ---------------------------------------------------------------------------

@dataclass
class FlowCurve:
    """Polyline of a gradient curve: F-times (or levels), points and rho values."""

    times: np.ndarray
    points: np.ndarray
    rho: np.ndarray
    parametrization: str
    start: np.ndarray
    step: float
    degenerate: bool = False
    steps: int = 0

    @property
    def end(self):
        return self.points[-1]

    @property
    def flow_time(self):
        return float(self.times[-1]) if len(self.times) else 0.0

    def __len__(self):
        return len(self.times)


@dataclass
class TransportResult:
    """Points carried to each requested level.

    ``points[i, j]`` is the image of start point i at ``targets[i, j]`` and
    ``times[i, j]`` the F-time spent (when a profile was given).
    """

    targets: np.ndarray
    points: np.ndarray
    times: np.ndarray | None
    degenerate: np.ndarray
    steps: np.ndarray
    path: list = field(default_factory=list)

    def at(self, j):
        return self.points[:, j]


def default_step(space):
    a = space.inradius
    return tol("step_fraction") * (a if a else 1.0)


def _rho_of(space, Y):
    return space.signed_rho(Y)


def _ascent(space, X, P):
    """Unit ascent at X from its footpoint P; the inward normal on the boundary itself."""
    U = space.ascent(X, P)
    on_boundary = space.dist(X, P) <= 1e-12
    if on_boundary.any():
        U[on_boundary] = space.boundary_normal(P[on_boundary])
    return U


def _onesided(space, X, Z):
    """Ascent at Z expressed in the tangent space at X."""
    return space.project_tangent(X, space.transport(Z, X, _ascent(space, Z, space.footpoint_batch(Z))))


def _advance(space, X, L, dl):
    """One level step for every row of X.

    Returns new points, their rho values, the level reached with unit gradient
    before any ridge (the split), the gradient norm after it, ridge flags and
    rows whose rate deviated. A step whose probe sees a different footpoint
    first moves along the one-sided gradient up to the ridge (located by
    bisection on the footpoint switch) and then follows the bisector of the two
    one-sided gradients, so curves slide along the medial set instead of
    zigzagging across it.
    """
    P = space.footpoint_batch(X)
    U1 = _ascent(space, X, P)
    Y = space.exp(X, U1 * dl[:, None])
    U2 = _onesided(space, X, Y)
    ridge = np.linalg.norm(U1 - U2, axis=-1) > tol("ridge")
    base, Lb, D = X.copy(), L.copy(), U1.copy()
    g = np.ones(len(X))
    lam = dl.copy()
    split = L + dl
    if ridge.any():
        k = np.flatnonzero(ridge)
        Xr, Ur = X[k], U1[k]
        lo, hi = np.zeros(len(k)), dl[k].copy()
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            same = np.linalg.norm(_onesided(space, Xr, space.exp(Xr, Ur * mid[:, None])) - Ur,
                                  axis=-1) <= tol("ridge")
            lo = np.where(same, mid, lo)
            hi = np.where(same, hi, mid)
        Xs = space.exp(Xr, Ur * lo[:, None])
        Ls = np.minimum(_rho_of(space, Xs), L[k] + dl[k])
        Ua = space.project_tangent(Xs, space.transport(Xr, Xs, Ur))
        rest = (L[k] + dl[k] - Ls)[:, None]
        Ub = _onesided(space, Xs, space.exp(Xs, Ua * np.maximum(rest, 1e-3 * dl[k, None])))
        B = 0.5 * (Ua + Ub)
        gr = np.linalg.norm(B, axis=-1)
        if (gr < tol("soul")).any():
            raise AtSoul("gradient vanishes along the flow")
        base[k], Lb[k], D[k], g[k] = Xs, Ls, B / gr[:, None], gr
        lam[k] = (L[k] + dl[k] - Ls) / gr
        split[k] = Ls
        Y[k] = space.exp(Xs, D[k] * lam[k, None])
    r = _rho_of(space, Y)
    rise = r - Lb
    rate = np.divide(rise, lam, out=g.copy(), where=lam > 0)
    deviant = (lam > 0) & (np.abs(rate - g) > tol("step_deviation") * g)
    target = L + dl
    eps = tol("level_match")
    for _ in range(8):
        err = target - r
        bad = (np.abs(err) > eps) & ~deviant & (lam > 0)
        if not bad.any():
            break
        rise = r[bad] - Lb[bad]
        if (rise <= 0).any():
            raise NonMonotone("rho failed to increase along the ascent direction")
        lam[bad] = lam[bad] * (1.0 + err[bad] / rise)
        Y[bad] = space.exp(base[bad], D[bad] * lam[bad, None])
        r[bad] = _rho_of(space, Y[bad])
    geff = np.divide(r - Lb, lam, out=g.copy(), where=lam > 0)
    return Y, r, split, geff, ridge, deviant


def _integrate(space, X0, L0, targets, step, profile=None, record=False):
    X = np.array(X0, dtype=float)
    L = np.array(L0, dtype=float)
    targets = np.asarray(targets, dtype=float)
    m, k = targets.shape
    out = np.empty((m, k, X.shape[1]))
    times = np.zeros((m, k)) if profile is not None else None
    tau = np.zeros(m)
    degenerate = np.zeros(m, dtype=bool)
    nsteps = np.zeros(m, dtype=int)
    j = np.zeros(m, dtype=int)
    h = np.full(m, float(step))
    path = [(0.0, X[0].copy(), L[0])] if record else []
    min_step = tol("min_step")
    snap = tol("level_match")

    def settle():
        # Record every target already reached.
        while True:
            live = np.flatnonzero(j < k)
            hit = live[targets[live, j[live]] <= L[live]]
            if not hit.size:
                return
            out[hit, j[hit]] = X[hit]
            if times is not None:
                times[hit, j[hit]] = tau[hit]
            j[hit] += 1

    settle()
    while True:
        act = np.flatnonzero(j < k)
        if not act.size:
            break
        goal = targets[act, j[act]]
        dl = np.minimum(h[act], goal - L[act])
        Y, r, split, geff, ridge, deviant = _advance(space, X[act], L[act], dl)
        if deviant.any():
            h[act[deviant]] = 0.5 * dl[deviant]
            if (h[act[deviant]] < min_step).any():
                raise StepCollapse("step fell below the minimum before reaching the target level")
        ok = ~deviant
        idx = act[ok]
        if profile is not None:
            mid = split[ok]
            tau[idx] += (profile.rise_time(L[idx], mid)
                         + profile.rise_time(mid, L[idx] + dl[ok]) / geff[ok] ** 2)
        X[idx] = Y[ok]
        # Nominal levels: exact arithmetic on the schedule, measured rho agrees to level_match.
        nxt = L[idx] + dl[ok]
        L[idx] = np.where(np.abs(goal[ok] - nxt) <= snap, goal[ok], nxt)
        degenerate[idx] |= ridge[ok]
        nsteps[idx] += 1
        h[idx] = np.minimum(2.0 * h[idx], step)
        if record and ok[0]:
            path.append((tau[0] if profile is not None else L[0] - L0[0], X[0].copy(), r[ok][0]))
        settle()
    return TransportResult(targets, out, times, degenerate, nsteps, path)


def _closed_form(space, X, offsets, profile):
    L0 = space.rho_batch(X)
    pts = np.stack([space.closed_form_flow(X, s) for s in offsets], axis=1)
    times = None
    if profile is not None:
        times = np.stack([profile.rise_time(L0, L0 + s) for s in offsets], axis=1)
    targets = L0[:, None] + np.asarray(offsets)[None, :]
    m = len(X)
    return TransportResult(targets, pts, times, np.zeros(m, dtype=bool), np.zeros(m, dtype=int))


def transport(space, P, offsets, step=None, profile=None):
    """Carry points by the Sharafutdinov flow through each offset in ``offsets``.

    ``P`` is an ``(m, d)`` batch; point i ends at level rho(P_i) + offsets[j]
    in column j of ``result.points``.
    """
    P = space.as_points(P)
    offsets = np.atleast_1d(np.asarray(offsets, dtype=float))
    if (offsets < 0).any() or (np.diff(offsets) < 0).any():
        raise ParameterError("offsets must be nonnegative and nondecreasing")
    L0 = np.asarray(rho(space, P), dtype=float).reshape(-1)
    a = space.inradius
    if a is not None and (L0.max() + offsets[-1] > a + tol("level_match")):
        raise ParameterError(f"target level exceeds the inradius {a:g}")
    if space.supports(CLOSED_FORM_FLOW):
        return _closed_form(space, P, offsets, profile)
    space.require(FLOW, "gradient flows")
    step = default_step(space) if step is None else float(step)
    if not step > 0:
        raise ParameterError("step must be positive")
    targets = L0[:, None] + offsets[None, :]
    return _integrate(space, P, L0, targets, step, profile)


def sharafutdinov_flow(space, p, T, step=None):
    """Curve from p in G(s) to Psi^T(p) in G(s + T), parametrized by level gain."""
    p = np.asarray(p, dtype=float)
    if T < 0:
        raise ParameterError("flow duration must be nonnegative")
    s = rho(space, p)
    step = default_step(space) if step is None else float(step)
    return _curve(space, p, s, T, step, None, "Sharafutdinov")


def _curve(space, p, s, T, step, profile, tag):
    a = space.inradius
    if a is not None and s + T > a + tol("level_match"):
        raise ParameterError(f"level {s + T:g} exceeds the inradius {a:g}")
    if T == 0:
        return FlowCurve(np.zeros(1), p[None, :].copy(), np.array([s]), tag, p, step)
    if space.supports(CLOSED_FORM_FLOW):
        ts = np.linspace(0.0, T, 2)
        pts = np.vstack([space.closed_form_flow(p[None, :], t) for t in ts])
        times = ts if profile is None else profile.rise_time(s, s + ts)
        return FlowCurve(np.asarray(times, dtype=float), pts, s + ts, tag, p, step, False, 1)
    space.require(FLOW, "gradient flows")
    res = _integrate(space, p[None, :], np.array([s]), np.array([[s + T]]), step, profile,
                     record=True)
    times = np.array([q[0] for q in res.path])
    pts = np.array([q[1] for q in res.path])
    levels = np.array([q[2] for q in res.path])
    pts[-1] = res.points[0, -1]
    return FlowCurve(times, pts, levels, tag, p, step, bool(res.degenerate[0]), int(res.steps[0]))


def _check_boundary_start(space, p):
    r0 = float(space.signed_rho(space.as_points(p))[0])
    if abs(r0) > 1e-8 * max(1.0, space.inradius or 1.0):
        raise ParameterError(f"start point is not on the boundary (rho = {r0:.3g})")
    rho(space, p)


def f_gradient_curve(space, profile, p, T, step=None):
    """F-gradient curve from p on the boundary until rho = T; times are F-times."""
    p = np.asarray(p, dtype=float)
    _check_boundary_start(space, p)
    profile.check_level(T)
    a = space.inradius
    if a is not None and T >= a:
        raise ParameterError(f"target level {T} must lie below the inradius {a:g}")
    step = default_step(space) if step is None else float(step)
    return _curve(space, p, 0.0, T, step, profile, "F-gradient")


def flow_time(space, profile, p, T, step=None):
    """F-time needed by the gradient curve from p to reach level T."""
    return f_gradient_curve(space, profile, p, T, step).flow_time


def flow_times(space, profile, P, T, step=None):
    """Batched :func:`flow_time` for boundary points P; also returns degenerate flags."""
    P = space.as_points(P)
    profile.check_level(T)
    if T == 0:
        return np.zeros(len(P)), np.zeros(len(P), dtype=bool)
    res = transport(space, P, [T], step=step, profile=profile)
    return res.times[:, 0], res.degenerate


def sharafutdinov_retraction(space, x, t, step=None):
    """Short retraction of the space onto the superlevel set rho >= t.

    Points with rho(x) >= t are fixed; a point closer to the boundary is carried
    forward along its gradient curve until it reaches G(t). Balls and caps use
    the closed-form radial or meridian map.
    """
    X = space.as_points(x)
    a = space.inradius
    if t < 0 or (a is not None and t > a):
        raise ParameterError(f"retraction level {t} outside [0, {a}]")
    r = np.asarray(rho(space, X), dtype=float).reshape(-1)
    closed = getattr(space, "closed_form_retraction", None)
    if closed is not None:
        out = closed(X, t)
    else:
        out = X.copy()
        move = r < t
        if move.any():
            if space.supports(CLOSED_FORM_FLOW):
                out[move] = np.vstack([space.closed_form_flow(X[i:i + 1], t - r[i])
                                       for i in np.flatnonzero(move)])
            else:
                step = default_step(space) if step is None else float(step)
                res = _integrate(space, X[move], r[move], np.full((int(move.sum()), 1), t), step)
                out[move] = res.points[:, 0]
    return out[0] if np.ndim(x) == 1 else out
