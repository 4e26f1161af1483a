"""Catalog of concrete spaces with boundary.

Every space exposes the distance-to-boundary field ``rho``, its footpoint
projection, membership, samplers and, where known, closed-form measures.
Points are numpy arrays in the space's chart:

* Euclidean kinds (ball, convex body, square): ambient coordinates in R^n.
* Spherical caps: unit vectors in R^{n+1}; the cap is centred on the last axis.
* Cones: ``[t, v]`` with ``t`` the cone coordinate and ``v`` a unit vector of the
  round base (or fiber parameters for measure-only bases).
* Warped collars: ``[t, fiber...]`` with ``t`` the depth below the outer face.

Batch methods on the classes take ``(m, d)`` arrays and assume their inputs
are valid; the module-level functions (:func:`rho`, :func:`footpoint`,
:func:`sample_interior`, ...) validate and are the public entry points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
import yaml

from . import _kernels
from .closed_forms import (
    power_integral,
    sin_power_integral,
    sphere_area,
    unit_ball_volume,
)
from .errors import (
    ConfigError,
    CurvatureAuditError,
    DepthOutOfRange,
    MultipleFootpoints,
    ParameterError,
    PointOutsideSpace,
    ProjectionDivergence,
    RejectionStarvation,
    UnsupportedBase,
    UnsupportedOperation,
)
from .tolerances import tol


class SpaceKind(str, Enum):
    EUCLIDEAN_BALL = "EuclideanBall"
    EUCLIDEAN_CONVEX_BODY = "EuclideanConvexBody"
    SPHERICAL_CAP = "SphericalCap"
    WARPED_PRODUCT_COLLAR = "WarpedProductCollar"
    LINEAR_CONE = "LinearCone"
    SPHERICAL_CONE = "SphericalCone"
    SQUARE_CONTROL = "SquareControl"


class CurvatureClass(str, Enum):
    NONNEGATIVE = "NonNegative"
    AT_LEAST_ONE = "AtLeastOne"

    @property
    def kappa(self):
        return 0 if self is CurvatureClass.NONNEGATIVE else 1

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        aliases = {
            "nonnegative": cls.NONNEGATIVE, "0": cls.NONNEGATIVE, "kappa0": cls.NONNEGATIVE,
            "atleastone": cls.AT_LEAST_ONE, "1": cls.AT_LEAST_ONE, "kappa1": cls.AT_LEAST_ONE,
        }
        key = str(value).replace("_", "").replace("-", "").lower()
        if key not in aliases:
            raise ParameterError(f"unknown curvature class {value!r}")
        return aliases[key]


# Capability flags.
DISTANCE = "distance"
FLOW = "flow"
CLOSED_FORM_FLOW = "closed_form_flow"
SAMPLING = "sampling"
MONTE_CARLO = "monte_carlo"
ANALYTIC_MEASURE = "analytic_measure"
BASE_ANGLE = "base_angle"


@dataclass(frozen=True)
class Region:
    """``whole``, ``collar(r)`` = B(boundary, r), or ``sublevel(t)`` = rho^-1[0, t]."""

    kind: str = "whole"
    r: float | None = None

    def __post_init__(self):
        if self.kind not in ("whole", "collar", "sublevel"):
            raise ParameterError(f"unknown region {self.kind!r}")
        if self.kind != "whole" and (self.r is None or self.r < 0):
            raise ParameterError(f"region {self.kind} needs a depth >= 0")

    @classmethod
    def parse(cls, region, r=None):
        if isinstance(region, Region):
            return region
        return cls(region, None if region == "whole" else r)

    @property
    def depth(self):
        return math.inf if self.kind == "whole" else self.r


@dataclass(frozen=True)
class LevelSetQuery:
    """Level ``t`` with its sublevel set, superlevel set and level set."""

    t: float
    inradius: float | None = None

    def __post_init__(self):
        if self.t < 0 or (self.inradius is not None and self.t > self.inradius):
            raise ParameterError(f"level {self.t} outside [0, {self.inradius}]")

    def in_sublevel(self, rho_values):
        return np.asarray(rho_values) <= self.t

    def in_superlevel(self, rho_values):
        return np.asarray(rho_values) >= self.t


@dataclass(frozen=True)
class CurvatureAudit:
    min_curvature: float
    max_curvature: float
    samples: int
    threshold: float
    passed: bool

    def summary(self):
        verdict = "certified 1-convex" if self.passed else "NOT 1-convex"
        return (f"curvature audit: {verdict}; principal curvatures in "
                f"[{self.min_curvature:.6g}, {self.max_curvature:.6g}] over {self.samples} "
                f"boundary samples (threshold {self.threshold:.6g})")


def _unit(V, axis=-1):
    nrm = np.linalg.norm(V, axis=axis, keepdims=True)
    return V / np.where(nrm > 0, nrm, 1.0)


def _uniform_sphere(rng, count, dim):
    """Uniform points on the unit sphere S^{dim-1} in R^dim."""
    Z = rng.standard_normal((count, dim))
    return _unit(Z)


class SpaceModel:
    """Base class. Subclasses fill in the geometry."""

    kind: SpaceKind
    metric = "euclidean"

    def __init__(self, dimension, curvature_class, inradius_hint=None, *,
                 hypothesis_violated=False, capabilities=(), audit=None):
        if int(dimension) != dimension or dimension < 1:
            raise ParameterError(f"dimension must be a positive integer, got {dimension}")
        self.dimension = int(dimension)
        self.curvature_class = CurvatureClass.parse(curvature_class)
        self.inradius_hint = inradius_hint
        self.hypothesis_violated = bool(hypothesis_violated)
        self.capabilities = frozenset(capabilities)
        self.audit = audit

    # -- descriptors --------------------------------------------------------
    @property
    def kappa(self):
        return self.curvature_class.kappa

    @property
    def ambient_dim(self):
        return self.dimension

    @property
    def inradius(self):
        return self.inradius_hint

    def parameters(self):
        return {}

    def describe(self):
        params = ", ".join(f"{k}={_fmt(v)}" for k, v in self.parameters().items())
        return f"{self.kind.value}(n={self.dimension}{', ' + params if params else ''})"

    def __repr__(self):
        return self.describe()

    def supports(self, capability):
        return capability in self.capabilities

    def require(self, capability, what):
        if capability not in self.capabilities:
            raise UnsupportedOperation(f"{self.kind.value} does not support {what}")

    def as_points(self, x):
        X = np.atleast_2d(np.asarray(x, dtype=float))
        if X.shape[-1] != self.ambient_dim:
            raise ParameterError(
                f"points for {self.kind.value} need {self.ambient_dim} coordinates, got {X.shape[-1]}")
        return X

    # -- geometry, overridden per kind -------------------------------------
    def contains(self, X):
        raise NotImplementedError

    def signed_rho(self, X):
        """rho inside, negative outside, continuous across the boundary."""
        raise NotImplementedError

    def rho_batch(self, X):
        return self.signed_rho(X)

    def footpoint_batch(self, X):
        raise UnsupportedOperation(f"{self.kind.value} has no footpoint projector")

    def footpoint_candidates(self, x):
        return self.footpoint_batch(x[None, :])

    def boundary_normal(self, P):
        raise UnsupportedOperation(f"{self.kind.value} has no boundary normal")

    def proposal(self, count, rng):
        raise UnsupportedOperation(f"{self.kind.value} has no Monte Carlo proposal")

    def _sample_interior(self, count, rng):
        return None

    def _sample_boundary(self, count, rng):
        raise UnsupportedOperation(f"{self.kind.value} has no boundary sampler")

    def _sample_level_exact(self, t, count, rng):
        return None

    def volume_exact(self, region):
        return None

    def boundary_area_exact(self):
        return None

    def level_area_exact(self, t):
        return None

    def closed_form_flow(self, P, s):
        return None

    # -- metric structure --------------------------------------------------
    def dist(self, X, Y):
        raise UnsupportedOperation(f"{self.kind.value} exposes measures only, not distances")

    def pairwise_dist(self, X):
        X = np.asarray(X)
        i, j = np.triu_indices(len(X), k=1)
        return i, j, self.dist(X[i], X[j])

    def exp(self, X, V):
        raise UnsupportedOperation(f"{self.kind.value} has no exponential map")

    def ascent(self, X, P):
        raise UnsupportedOperation(f"{self.kind.value} has no gradient field")

    def transport(self, X_from, X_to, V):
        return V

    def project_tangent(self, X, V):
        return V

    def tangent_basis(self, x, normal):
        raise UnsupportedOperation(f"{self.kind.value} has no tangent structure")

    def level_normal(self, X, t):
        """Inward unit normal of the superlevel set rho >= t at points of G(t)."""
        X = np.atleast_2d(X)
        if t <= 0:
            return self.boundary_normal(X)
        return self.ascent(X, self.footpoint_batch(X))


def _fmt(v):
    if isinstance(v, (list, tuple, np.ndarray)):
        return "(" + ", ".join(_fmt(u) for u in v) + ")"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


class EuclideanSpace(SpaceModel):
    """Shared Euclidean structure: straight segments, chordal distances."""

    def dist(self, X, Y):
        D = np.asarray(X) - np.asarray(Y)
        return np.sqrt((D * D).sum(axis=-1))

    def exp(self, X, V):
        return np.asarray(X) + V

    def ascent(self, X, P):
        return _unit(np.asarray(X) - P)

    def tangent_basis(self, x, normal):
        _, _, vt = np.linalg.svd(np.asarray(normal, dtype=float)[None, :])
        return vt[1:]


class SphericalSpace(SpaceModel):
    """Shared unit-sphere structure: great-circle arcs in the ambient R^{n+1}."""

    metric = "sphere"

    @property
    def ambient_dim(self):
        return self.dimension + 1

    def dist(self, X, Y):
        chord = np.linalg.norm(np.asarray(X) - np.asarray(Y), axis=-1)
        return 2.0 * np.arcsin(np.minimum(chord * 0.5, 1.0))

    def exp(self, X, V):
        X = np.atleast_2d(X)
        V = np.atleast_2d(V)
        th = np.linalg.norm(V, axis=-1, keepdims=True)
        dirn = V / np.where(th > 0, th, 1.0)
        Y = np.cos(th) * X + np.sin(th) * dirn
        return _unit(Y)

    def log_dir(self, X, P):
        """Unit initial direction at X of the great circle towards P."""
        X = np.atleast_2d(X)
        W = P - (P * X).sum(axis=-1, keepdims=True) * X
        return _unit(W)

    def ascent(self, X, P):
        return -self.log_dir(X, P)

    def transport(self, X_from, X_to, V):
        # Parallel transport along the minimizing great circle.
        a = np.atleast_2d(X_from)
        b = np.atleast_2d(X_to)
        V = np.atleast_2d(V)
        coef = (b * V).sum(axis=-1, keepdims=True) / (1.0 + (a * b).sum(axis=-1, keepdims=True))
        return V - coef * (a + b)

    def project_tangent(self, X, V):
        X = np.atleast_2d(X)
        return V - (V * X).sum(axis=-1, keepdims=True) * X

    def tangent_basis(self, x, normal):
        M = np.vstack([x, normal])
        _, _, vt = np.linalg.svd(M)
        return vt[2:]


# ---------------------------------------------------------------------------
# Euclidean ball
# ---------------------------------------------------------------------------

class EuclideanBall(EuclideanSpace):
    kind = SpaceKind.EUCLIDEAN_BALL

    def __init__(self, dimension=3, radius=1.0):
        if dimension < 2:
            raise ParameterError("ball dimension must be >= 2")
        if not radius > 0:
            raise ParameterError("ball radius must be positive")
        self.radius = float(radius)
        k = 1.0 / self.radius
        thr = 1.0 - tol("curvature_audit")
        audit = CurvatureAudit(k, k, 0, thr, k >= thr)
        super().__init__(dimension, CurvatureClass.NONNEGATIVE, self.radius,
                         hypothesis_violated=not audit.passed, audit=audit,
                         capabilities={DISTANCE, FLOW, SAMPLING, MONTE_CARLO,
                                       ANALYTIC_MEASURE, BASE_ANGLE})

    def parameters(self):
        return {"radius": self.radius}

    def contains(self, X):
        return np.linalg.norm(X, axis=-1) <= self.radius * (1 + tol("chart"))

    def signed_rho(self, X):
        return self.radius - np.linalg.norm(X, axis=-1)

    def rho_batch(self, X):
        return np.maximum(self.signed_rho(X), 0.0)

    def footpoint_batch(self, X):
        X = np.atleast_2d(X)
        r = np.linalg.norm(X, axis=-1, keepdims=True)
        E = np.zeros_like(X)
        E[:, 0] = 1.0
        U = np.where(r > 0, X / np.where(r > 0, r, 1.0), E)
        return self.radius * U

    def footpoint_candidates(self, x):
        if np.linalg.norm(x) <= tol("medial_separation") * self.radius:
            eye = np.eye(self.dimension) * self.radius
            return np.vstack([eye, -eye])
        return self.footpoint_batch(x[None, :])

    def boundary_normal(self, P):
        return -_unit(np.atleast_2d(P))

    def proposal(self, count, rng):
        R = self.radius
        return rng.uniform(-R, R, (count, self.dimension)), (2 * R) ** self.dimension

    def _sample_boundary(self, count, rng):
        return self.radius * _uniform_sphere(rng, count, self.dimension)

    def _sample_level_exact(self, t, count, rng):
        return (self.radius - t) * _uniform_sphere(rng, count, self.dimension)

    def _ball(self, s):
        return unit_ball_volume(self.dimension) * max(s, 0.0) ** self.dimension

    def volume_exact(self, region):
        R = self.radius
        if region.kind == "whole":
            return self._ball(R)
        return self._ball(R) - self._ball(R - min(region.r, R))

    def boundary_area_exact(self):
        return self.level_area_exact(0.0)

    def level_area_exact(self, t):
        n = self.dimension
        return sphere_area(n - 1) * max(self.radius - t, 0.0) ** (n - 1)

    def closed_form_retraction(self, X, t):
        """Nearest-point map onto the concentric ball of radius R - t."""
        s = self.radius - t
        r = np.linalg.norm(X, axis=-1, keepdims=True)
        return np.where(r > s, X * (s / np.where(r > 0, r, 1.0)), X)


# ---------------------------------------------------------------------------
# Implicit convex bodies {g <= 0}
# ---------------------------------------------------------------------------

class ImplicitBody(EuclideanSpace):
    """Smooth strongly convex body ``{g <= 0}``.

    ``g``, ``grad`` and ``hess`` act on ``(m, n)`` arrays and return ``(m,)``,
    ``(m, n)`` and ``(m, n, n)`` arrays. Footpoints come from a projected Newton
    iteration on the KKT system ``y - x + mu grad g(y) = 0, g(y) = 0``, started
    from several boundary points, with a damped fixed-point fallback.

    The boundary is audited at construction: every sampled principal curvature
    must be at least ``1 - 1e-6``. With ``audit="strict"`` a failed audit raises
    :class:`CurvatureAuditError`; with ``audit="report"`` the body is kept and
    flagged ``hypothesis_violated``.
    """

    kind = SpaceKind.EUCLIDEAN_CONVEX_BODY

    def __init__(self, g, grad, hess, dimension, bbox, *, center=None, audit="strict",
                 audit_samples=4096, inradius_hint=None, name="implicit"):
        if audit not in ("strict", "report"):
            raise ParameterError("audit must be 'strict' or 'report'")
        self._g, self._grad, self._hess = g, grad, hess
        lo, hi = (np.asarray(b, dtype=float) for b in bbox)
        self.bbox = (lo, hi)
        self.center = np.zeros(dimension) if center is None else np.asarray(center, dtype=float)
        self.name = name
        super().__init__(dimension, CurvatureClass.NONNEGATIVE, inradius_hint,
                         capabilities={DISTANCE, FLOW, SAMPLING, MONTE_CARLO, BASE_ANGLE})
        if self._g(self.center[None, :])[0] >= 0:
            raise ParameterError("center must be an interior point of the body")
        self.audit = self._curvature_audit(audit_samples)
        self.hypothesis_violated = not self.audit.passed
        if audit == "strict" and not self.audit.passed:
            raise CurvatureAuditError(self.audit.summary(), self.audit)

    @property
    def diameter_bound(self):
        lo, hi = self.bbox
        return float(np.linalg.norm(hi - lo))

    def parameters(self):
        return {"name": self.name}

    def g(self, X):
        return self._g(np.atleast_2d(X))

    def contains(self, X):
        return self._g(np.atleast_2d(X)) <= tol("projection")

    def signed_rho(self, X):
        X = np.atleast_2d(X)
        gv = self._g(X)
        out = np.empty(len(X))
        inside = gv <= 0
        if inside.any():
            out[inside] = self.rho_batch(X[inside])
        if (~inside).any():
            G = self._grad(X[~inside])
            out[~inside] = -gv[~inside] / np.linalg.norm(G, axis=-1)
        return out

    def rho_batch(self, X):
        X = np.atleast_2d(X)
        return self.dist(X, self.footpoint_batch(X))

    def footpoint_batch(self, X):
        X = np.atleast_2d(X)
        best = None
        best_d = None
        for Y0 in self._starts(X):
            Y, ok = self._project_from(X, Y0)
            d = np.where(ok, self.dist(X, Y), np.inf)
            if best is None:
                best, best_d = Y, d
            else:
                better = d < best_d
                best[better] = Y[better]
                best_d[better] = d[better]
        if not np.isfinite(best_d).all():
            raise ProjectionDivergence("footpoint solver failed to converge")
        return best

    # -- projection machinery ----------------------------------------------
    def ray_hit(self, X, D):
        """Boundary point on the ray X + s D, s > 0, for interior X."""
        X = np.atleast_2d(X)
        D = _unit(np.atleast_2d(D))
        lo = np.zeros(len(X))
        hi = np.full(len(X), self.diameter_bound)
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            inside = self._g(X + mid[:, None] * D) <= 0
            lo = np.where(inside, mid, lo)
            hi = np.where(inside, hi, mid)
        s = 0.5 * (lo + hi)
        for _ in range(3):
            Y = X + s[:, None] * D
            slope = (self._grad(Y) * D).sum(axis=-1)
            s = s - self._g(Y) / np.where(slope > 0, slope, 1.0)
        return X + s[:, None] * D

    def radial_boundary(self, U):
        U = np.atleast_2d(U)
        return self.ray_hit(np.broadcast_to(self.center, U.shape).copy(), U)

    def _starts(self, X):
        n = self.dimension
        rel = X - self.center
        radial = np.where(np.linalg.norm(rel, axis=-1, keepdims=True) > 0, rel,
                          np.eye(n)[0])
        yield self.ray_hit(X, radial)
        for i in range(n):
            for sgn in (1.0, -1.0):
                D = np.zeros_like(X)
                D[:, i] = sgn
                yield self.ray_hit(X, D)

    def _project_from(self, X, Y0):
        Y, ok = self._kkt_newton(X, Y0)
        if not ok.all():
            Yf, okf = self._fixed_point(X[~ok], Y[~ok])
            Y[~ok] = Yf
            ok[~ok] = okf
        return Y, ok

    def _kkt_newton(self, X, Y0):
        n = X.shape[1]
        Y = Y0.copy()
        G = self._grad(Y)
        mu = -np.linalg.norm(X - Y, axis=-1) / np.linalg.norm(G, axis=-1)
        eps = tol("projection")

        def residual(Xs, Y, mu):
            G = self._grad(Y)
            return np.concatenate([Y - Xs + mu[:, None] * G, self._g(Y)[:, None]], axis=1)

        F = residual(X, Y, mu)
        norm = np.linalg.norm(F, axis=1)
        ok = norm <= eps
        eye = np.eye(n)
        for _ in range(int(tol("projection_max_iter"))):
            act = ~ok
            if not act.any():
                break
            Xa, Ya, ma, Fa = X[act], Y[act], mu[act], F[act]
            G = self._grad(Ya)
            H = self._hess(Ya)
            J = np.zeros((len(Ya), n + 1, n + 1))
            J[:, :n, :n] = eye + ma[:, None, None] * H
            J[:, :n, n] = G
            J[:, n, :n] = G
            try:
                step = np.linalg.solve(J, -Fa[..., None])[..., 0]
            except np.linalg.LinAlgError:
                break
            lam = np.ones(len(Ya))
            na = norm[act]
            for _ in range(20):
                Yt = Ya + lam[:, None] * step[:, :n]
                mt = ma + lam * step[:, n]
                Ft = residual(Xa, Yt, mt)
                nt = np.linalg.norm(Ft, axis=1)
                good = nt < na * (1 - 1e-4 * lam) + 1e-300
                if good.all():
                    break
                lam = np.where(good, lam, 0.5 * lam)
            Y[act], mu[act], F[act], norm[act] = Yt, mt, Ft, nt
            ok = norm <= eps
        # A critical point with mu >= 0 is not an interior projection.
        ok &= mu < 0
        return Y, ok

    def _fixed_point(self, X, Y0, omega=0.5, iters=400):
        Y = Y0.copy()
        eps = tol("projection")
        for _ in range(iters):
            N = _unit(self._grad(Y))
            D = _unit(X - Y)
            dirn = _unit((1 - omega) * (-D) + omega * N)
            Y = self.ray_hit(X, dirn)
            N = _unit(self._grad(Y))
            D = X - Y
            res = np.linalg.norm(D - (D * N).sum(axis=-1, keepdims=True) * N, axis=-1)
            if (res <= eps).all():
                break
        return Y, res <= eps

    def footpoint_candidates(self, x):
        X = x[None, :]
        starts = list(self._starts(X))
        base = self.footpoint_batch(X)
        starts.append(base)
        rel = base - self.center
        for i in range(self.dimension):
            R = rel.copy()
            R[:, i] *= -1
            starts.append(self.radial_boundary(R))
        found = []
        for Y0 in starts:
            Y, ok = self._project_from(X, Y0)
            if ok[0]:
                found.append(Y[0])
        return np.array(found) if found else base

    # -- curvature ----------------------------------------------------------
    def principal_curvatures(self, Y):
        Y = np.atleast_2d(Y)
        G = self._grad(Y)
        H = self._hess(Y)
        out = []
        for y, gvec, h in zip(Y, G, H):
            B = self.tangent_basis(y, gvec)
            S = B @ h @ B.T / np.linalg.norm(gvec)
            out.append(np.linalg.eigvalsh(0.5 * (S + S.T)))
        return np.array(out)

    def _audit_points(self, count):
        rng = np.random.default_rng(0)
        pts = [self._sample_boundary(count, rng)]
        eye = np.eye(self.dimension)
        pts.append(self.radial_boundary(np.vstack([eye, -eye])))
        return np.vstack(pts)

    def _curvature_audit(self, count):
        K = self.principal_curvatures(self._audit_points(count))
        thr = 1.0 - tol("curvature_audit")
        kmin = float(K.min())
        return CurvatureAudit(kmin, float(K.max()), len(K), thr, kmin >= thr)

    def boundary_normal(self, P):
        return -_unit(self._grad(np.atleast_2d(P)))

    # -- sampling -----------------------------------------------------------
    def proposal(self, count, rng):
        lo, hi = self.bbox
        return rng.uniform(lo, hi, (count, self.dimension)), float(np.prod(hi - lo))

    def _radial_weight(self, U):
        Y = self.radial_boundary(U)
        r = np.linalg.norm(Y - self.center, axis=-1)
        N = _unit(self._grad(Y))
        cos = (U * N).sum(axis=-1)
        return Y, r ** (self.dimension - 1) / cos

    def _sample_boundary(self, count, rng):
        # Radial map of uniform sphere directions, area-corrected by rejection.
        probe = _uniform_sphere(np.random.default_rng(12345), 4096, self.dimension)
        _, wp = self._radial_weight(probe)
        wmax = 1.25 * wp.max()
        out = []
        have = 0
        while have < count:
            U = _uniform_sphere(rng, max(2 * (count - have), 256), self.dimension)
            Y, w = self._radial_weight(U)
            keep = rng.uniform(0, wmax, len(w)) < w
            out.append(Y[keep])
            have += int(keep.sum())
        return np.vstack(out)[:count]


class Ellipsoid(ImplicitBody):
    """Axis-aligned ellipsoid ``sum(x_i^2 / a_i^2) <= 1``.

    Footpoints use the compiled secular-equation kernel; the generic KKT route
    stays available through :meth:`footpoint_kkt` as an independent check.
    """

    def __init__(self, semi_axes, *, audit="strict", audit_samples=4096):
        a = np.asarray(semi_axes, dtype=float)
        if a.ndim != 1 or len(a) < 2 or not (a > 0).all():
            raise ParameterError("semi_axes must be >= 2 positive numbers")
        self.semi_axes = a
        inv2 = 1.0 / (a * a)

        def g(X):
            return (X * X * inv2).sum(axis=-1) - 1.0

        def grad(X):
            return 2.0 * X * inv2

        def hess(X):
            return np.broadcast_to(np.diag(2.0 * inv2), (len(X), len(a), len(a))).copy()

        super().__init__(g, grad, hess, len(a), (-a, a), audit=audit,
                         audit_samples=audit_samples, inradius_hint=float(a.min()),
                         name="ellipsoid")

    def parameters(self):
        return {"semi_axes": [float(v) for v in self.semi_axes]}

    def _project(self, X):
        rho, Y, ok = _kernels.ellipsoid_project(np.atleast_2d(X), self.semi_axes)
        if not ok.all():
            raise ProjectionDivergence(f"{int((~ok).sum())} ellipsoid projections did not converge")
        return rho, Y

    def rho_batch(self, X):
        return self._project(X)[0]

    def footpoint_batch(self, X):
        return self._project(X)[1]

    def footpoint_kkt(self, X):
        return ImplicitBody.footpoint_batch(self, X)

    def radial_boundary(self, U):
        U = np.atleast_2d(U)
        s = 1.0 / np.sqrt((U * U / self.semi_axes**2).sum(axis=-1))
        return U * s[:, None]

    def _sample_boundary(self, count, rng):
        # Uniform sphere pushed through diag(a), thinned by the area element.
        a = self.semi_axes
        out = []
        have = 0
        while have < count:
            U = _uniform_sphere(rng, max(2 * (count - have), 256), self.dimension)
            w = a.min() * np.sqrt((U * U / (a * a)).sum(axis=-1))
            keep = rng.uniform(0, 1, len(w)) < w
            out.append(U[keep] * a)
            have += int(keep.sum())
        return np.vstack(out)[:count]

    def volume_exact(self, region):
        if region.kind == "whole" or region.r >= self.inradius:
            return unit_ball_volume(self.dimension) * float(np.prod(self.semi_axes))
        if region.r == 0:
            return 0.0
        return None


# ---------------------------------------------------------------------------
# Spherical caps
# ---------------------------------------------------------------------------

class SphericalCap(SphericalSpace):
    """Cap of angular radius R around the last axis of the unit sphere S^n."""

    kind = SpaceKind.SPHERICAL_CAP

    def __init__(self, dimension=2, angular_radius=math.pi / 2):
        if dimension < 2:
            raise ParameterError("cap dimension must be >= 2")
        if not 0 < angular_radius <= math.pi / 2 + 1e-15:
            raise ParameterError("cap angular radius must lie in (0, pi/2]")
        self.angular_radius = float(angular_radius)
        super().__init__(dimension, CurvatureClass.AT_LEAST_ONE, self.angular_radius,
                         capabilities={DISTANCE, FLOW, SAMPLING, MONTE_CARLO,
                                       ANALYTIC_MEASURE, BASE_ANGLE})
        self.pole = np.zeros(dimension + 1)
        self.pole[-1] = 1.0

    def parameters(self):
        return {"angular_radius": self.angular_radius}

    def colatitude(self, X):
        X = np.atleast_2d(X)
        return np.arctan2(np.linalg.norm(X[:, :-1], axis=-1), X[:, -1])

    def contains(self, X):
        X = np.atleast_2d(X)
        on_sphere = np.abs(np.linalg.norm(X, axis=-1) - 1.0) <= 1e-9
        return on_sphere & (self.colatitude(X) <= self.angular_radius * (1 + tol("chart")))

    def signed_rho(self, X):
        return self.angular_radius - self.colatitude(X)

    def rho_batch(self, X):
        return np.maximum(self.signed_rho(X), 0.0)

    def _meridian(self, X):
        X = np.atleast_2d(X)
        perp = X[:, :-1]
        r = np.linalg.norm(perp, axis=-1, keepdims=True)
        E = np.zeros_like(perp)
        E[:, 0] = 1.0
        return np.where(r > 0, perp / np.where(r > 0, r, 1.0), E)

    def _at_colatitude(self, E, theta):
        theta = np.broadcast_to(np.asarray(theta, dtype=float), (len(E),))
        return np.hstack([np.sin(theta)[:, None] * E, np.cos(theta)[:, None]])

    def footpoint_batch(self, X):
        return self._at_colatitude(self._meridian(X), self.angular_radius)

    def footpoint_candidates(self, x):
        if np.linalg.norm(x[:-1]) <= tol("medial_separation"):
            eye = np.eye(self.dimension)
            return self._at_colatitude(np.vstack([eye, -eye]), self.angular_radius)
        return self.footpoint_batch(x[None, :])

    def boundary_normal(self, P):
        P = np.atleast_2d(P)
        return self.log_dir(P, np.broadcast_to(self.pole, P.shape))

    def proposal(self, count, rng):
        return _uniform_sphere(rng, count, self.dimension + 1), sphere_area(self.dimension)

    def _sample_boundary(self, count, rng):
        return self._sample_level_exact(0.0, count, rng)

    def _sample_level_exact(self, t, count, rng):
        E = _uniform_sphere(rng, count, self.dimension)
        return self._at_colatitude(E, self.angular_radius - t)

    def _band(self, lo, hi):
        n = self.dimension
        return sphere_area(n - 1) * sin_power_integral(n - 1, lo, hi)

    def volume_exact(self, region):
        R = self.angular_radius
        if region.kind == "whole":
            return self._band(0.0, R)
        return self._band(max(R - region.r, 0.0), R)

    def boundary_area_exact(self):
        return self.level_area_exact(0.0)

    def level_area_exact(self, t):
        n = self.dimension
        return sphere_area(n - 1) * math.sin(max(self.angular_radius - t, 0.0)) ** (n - 1)

    def closed_form_retraction(self, X, t):
        X = np.atleast_2d(X)
        theta = self.colatitude(X)
        target = self.angular_radius - t
        moved = self._at_colatitude(self._meridian(X), target)
        return np.where((theta > target)[:, None], moved, X)


# ---------------------------------------------------------------------------
# Square control
# ---------------------------------------------------------------------------

class SquareControl(EuclideanSpace):
    """The cube [-1, 1]^n (the square for n = 2).

    Its boundary is flat, i.e. 0-convex rather than 1-convex, so it is flagged
    ``hypothesis_violated`` and serves as a negative control.
    """

    kind = SpaceKind.SQUARE_CONTROL

    def __init__(self, dimension=2):
        if dimension < 2:
            raise ParameterError("square dimension must be >= 2")
        thr = 1.0 - tol("curvature_audit")
        super().__init__(dimension, CurvatureClass.NONNEGATIVE, 1.0, hypothesis_violated=True,
                         audit=CurvatureAudit(0.0, 0.0, 0, thr, False),
                         capabilities={DISTANCE, FLOW, SAMPLING, MONTE_CARLO,
                                       ANALYTIC_MEASURE, BASE_ANGLE})

    def parameters(self):
        return {"side": 2.0}

    def contains(self, X):
        return np.abs(np.atleast_2d(X)).max(axis=-1) <= 1.0 + tol("chart")

    def signed_rho(self, X):
        return 1.0 - np.abs(np.atleast_2d(X)).max(axis=-1)

    def rho_batch(self, X):
        return np.maximum(self.signed_rho(X), 0.0)

    def footpoint_batch(self, X):
        X = np.atleast_2d(X)
        i = np.abs(X).argmax(axis=-1)
        Y = X.copy()
        rows = np.arange(len(X))
        Y[rows, i] = np.where(X[rows, i] >= 0, 1.0, -1.0)
        return Y

    def footpoint_candidates(self, x):
        out = []
        for i in range(self.dimension):
            for s in (1.0, -1.0):
                y = x.copy()
                y[i] = s
                out.append(y)
        return np.array(out)

    def boundary_normal(self, P):
        P = np.atleast_2d(P)
        i = np.abs(P).argmax(axis=-1)
        N = np.zeros_like(P)
        rows = np.arange(len(P))
        N[rows, i] = -np.sign(P[rows, i])
        return N

    def proposal(self, count, rng):
        return rng.uniform(-1, 1, (count, self.dimension)), 2.0 ** self.dimension

    def _sample_boundary(self, count, rng):
        return self._sample_level_exact(0.0, count, rng)

    def _sample_level_exact(self, t, count, rng):
        n = self.dimension
        s = 1.0 - t
        X = rng.uniform(-s, s, (count, n))
        face = rng.integers(0, 2 * n, count)
        rows = np.arange(count)
        X[rows, face // 2] = np.where(face % 2 == 0, s, -s)
        return X

    def volume_exact(self, region):
        n = self.dimension
        if region.kind == "whole":
            return 2.0 ** n
        return 2.0 ** n - (2.0 * max(1.0 - region.r, 0.0)) ** n

    def boundary_area_exact(self):
        return self.level_area_exact(0.0)

    def level_area_exact(self, t):
        n = self.dimension
        return 2 * n * (2.0 * max(1.0 - t, 0.0)) ** (n - 1)


# ---------------------------------------------------------------------------
# Cones and warped collars
# ---------------------------------------------------------------------------

class ConeSpace(SpaceModel):
    """Linear cone [0,T] x_t V or spherical cone [0,T] x_sin(t) V.

    A round-sphere base S^m(c) carries the full cone metric; a measure-only base
    (given by its area) supports measures and rho but not distances.
    Chart: ``[t, v]`` with t the cone coordinate (apex at t = 0, boundary at t = T).
    rho = T - t.
    """

    def __init__(self, warp, base, T):
        self.warp = warp
        self.kind = SpaceKind.LINEAR_CONE if warp == "linear" else SpaceKind.SPHERICAL_CONE
        self.T = float(T)
        self.base_dim = int(base["dimension"])
        self.base_radius = base.get("radius")
        if self.base_radius is not None:
            self.base_area = sphere_area(self.base_dim) * self.base_radius ** self.base_dim
        else:
            self.base_area = float(base["area"])
        round_base = self.base_radius is not None
        if warp == "linear":
            cls, convex = CurvatureClass.NONNEGATIVE, self.T <= 1.0
        else:
            cls, convex = CurvatureClass.AT_LEAST_ONE, self.T <= math.pi / 2
        violated = (not convex) or (round_base and self.base_radius > 1.0)
        caps = {SAMPLING, ANALYTIC_MEASURE}
        if round_base:
            caps |= {DISTANCE, CLOSED_FORM_FLOW}
        super().__init__(self.base_dim + 1, cls, self.T, hypothesis_violated=violated,
                         capabilities=caps)

    @property
    def round_base(self):
        return self.base_radius is not None

    @property
    def ambient_dim(self):
        return 1 + self.base_dim + (1 if self.round_base else 0)

    def parameters(self):
        base = (f"S^{self.base_dim}({self.base_radius:g})" if self.round_base
                else f"measure(area={self.base_area:g})")
        return {"T": self.T, "base": base}

    def _w(self, t):
        return t if self.warp == "linear" else np.sin(t)

    def _w_integral(self, a, b):
        m = self.base_dim
        if self.warp == "linear":
            return power_integral(m, a, b)
        return sin_power_integral(m, a, b)

    def contains(self, X):
        X = np.atleast_2d(X)
        t = X[:, 0]
        ok = (t >= -tol("chart")) & (t <= self.T * (1 + tol("chart")))
        if self.round_base:
            ok &= np.abs(np.linalg.norm(X[:, 1:], axis=-1) - 1) <= 1e-9
        return ok

    def signed_rho(self, X):
        return self.T - np.atleast_2d(X)[:, 0]

    def dist(self, X, Y):
        if not self.round_base:
            raise UnsupportedOperation("measure-only cone base has no distances")
        X, Y = np.atleast_2d(X), np.atleast_2d(Y)
        t1, t2 = X[:, 0], Y[:, 0]
        chord = np.linalg.norm(X[:, 1:] - Y[:, 1:], axis=-1)
        dV = self.base_radius * 2.0 * np.arcsin(np.minimum(chord * 0.5, 1.0))
        c = np.cos(np.minimum(dV, math.pi))
        if self.warp == "linear":
            return np.sqrt(np.maximum(t1 * t1 + t2 * t2 - 2 * t1 * t2 * c, 0.0))
        cosd = np.cos(t1) * np.cos(t2) + np.sin(t1) * np.sin(t2) * c
        # Robust for nearby points: use the half-angle form.
        hav = (np.sin((t1 - t2) / 2) ** 2
               + np.sin(t1) * np.sin(t2) * np.sin(np.minimum(dV, math.pi) / 2) ** 2)
        d = 2 * np.arcsin(np.sqrt(np.clip(hav, 0.0, 1.0)))
        return np.where(np.isfinite(d), d, np.arccos(np.clip(cosd, -1, 1)))

    def closed_form_flow(self, P, s):
        P = np.array(np.atleast_2d(P), dtype=float)
        P[:, 0] = P[:, 0] - s
        if (P[:, 0] < -tol("chart")).any():
            raise ParameterError("flow past the cone apex")
        P[:, 0] = np.maximum(P[:, 0], 0.0)
        return P

    def footpoint_batch(self, X):
        Y = np.array(np.atleast_2d(X), dtype=float)
        Y[:, 0] = self.T
        return Y

    def _fiber(self, rng, count):
        if self.round_base:
            return _uniform_sphere(rng, count, self.base_dim + 1)
        return rng.uniform(0, 1, (count, self.base_dim))

    def _heights(self, rng, count):
        m = self.base_dim
        if self.warp == "linear":
            return self.T * rng.uniform(0, 1, count) ** (1.0 / (m + 1))
        wmax = math.sin(min(self.T, math.pi / 2)) ** m
        out = []
        have = 0
        while have < count:
            t = rng.uniform(0, self.T, 2 * (count - have) + 16)
            keep = rng.uniform(0, wmax, len(t)) < np.sin(t) ** m
            out.append(t[keep])
            have += int(keep.sum())
        return np.concatenate(out)[:count]

    def _sample_interior(self, count, rng):
        return np.hstack([self._heights(rng, count)[:, None], self._fiber(rng, count)])

    def _sample_boundary(self, count, rng):
        return self._sample_level_exact(0.0, count, rng)

    def _sample_level_exact(self, t, count, rng):
        return np.hstack([np.full((count, 1), self.T - t), self._fiber(rng, count)])

    def volume_exact(self, region):
        lo = 0.0 if region.kind == "whole" else max(self.T - region.r, 0.0)
        return self.base_area * self._w_integral(lo, self.T)

    def boundary_area_exact(self):
        return self.level_area_exact(0.0)

    def level_area_exact(self, t):
        return self.base_area * float(self._w(max(self.T - t, 0.0))) ** self.base_dim


class WarpedProductCollar(SpaceModel):
    """Synthetic equality-model collar dX x_{w(t)} [0, r] with w = 1 - t or cos t.

    Exposes measures only; chart ``[t, fiber...]`` with rho = t.
    """

    kind = SpaceKind.WARPED_PRODUCT_COLLAR

    def __init__(self, boundary_area, curvature_class, depth, dimension):
        self.A0 = float(boundary_area)
        self.depth = float(depth)
        super().__init__(dimension, curvature_class, self.depth,
                         capabilities={SAMPLING, ANALYTIC_MEASURE})

    def parameters(self):
        return {"boundary_area": self.A0, "depth": self.depth, "kappa": self.kappa}

    def _w(self, t):
        return 1.0 - t if self.kappa == 0 else np.cos(t)

    def contains(self, X):
        t = np.atleast_2d(X)[:, 0]
        return (t >= -tol("chart")) & (t <= self.depth * (1 + tol("chart")))

    def signed_rho(self, X):
        return np.atleast_2d(X)[:, 0]

    def _sample_interior(self, count, rng):
        m = self.dimension - 1
        out = []
        have = 0
        while have < count:
            t = rng.uniform(0, self.depth, 2 * (count - have) + 16)
            keep = rng.uniform(0, 1, len(t)) < self._w(t) ** m
            out.append(t[keep])
            have += int(keep.sum())
        t = np.concatenate(out)[:count]
        return np.hstack([t[:, None], rng.uniform(0, 1, (count, m))])

    def _sample_boundary(self, count, rng):
        return self._sample_level_exact(0.0, count, rng)

    def _sample_level_exact(self, t, count, rng):
        return np.hstack([np.full((count, 1), t), rng.uniform(0, 1, (count, self.dimension - 1))])

    def volume_exact(self, region):
        from .closed_forms import model_warp_integral

        hi = self.depth if region.kind == "whole" else min(region.r, self.depth)
        return self.A0 * model_warp_integral(self.kappa, self.dimension - 1, 0.0, hi)

    def boundary_area_exact(self):
        return self.A0

    def level_area_exact(self, t):
        return self.A0 * float(self._w(t)) ** (self.dimension - 1)


def make_cone(base_description, kind, T):
    """Linear cone ``[0,T] x_t V`` or spherical cone ``[0,T] x_sin(t) V``.

    ``base_description`` is a mapping ``{"type": "round_sphere", "dimension": m,
    "radius": c}`` (full metric support) or ``{"type": "measure", "dimension": m,
    "area": A}`` (measures only).
    """
    if kind not in ("linear", "spherical"):
        raise ParameterError(f"cone kind must be 'linear' or 'spherical', got {kind!r}")
    if kind == "linear" and not 0 < T < math.inf:
        raise DepthOutOfRange(f"linear cone height must lie in (0, inf), got {T}")
    if kind == "spherical" and not 0 < T <= math.pi:
        raise DepthOutOfRange(f"spherical cone height must lie in (0, pi], got {T}")
    base = dict(base_description)
    btype = base.get("type")
    if btype in ("round_sphere", "sphere"):
        if base.get("radius", 1.0) <= 0:
            raise ParameterError("base sphere radius must be positive")
        base.setdefault("radius", 1.0)
    elif btype == "measure":
        if base.get("area", 0) <= 0:
            raise ParameterError("measure-only base needs a positive area")
        base["radius"] = None
    else:
        raise UnsupportedBase(f"no closed-form fiber metric for base type {btype!r}")
    if int(base.get("dimension", 0)) < 1:
        raise ParameterError("base dimension must be >= 1")
    return ConeSpace(kind, base, T)


def make_warped_collar(boundary_area, kappa, depth, dimension=3):
    """Equality-model collar with A(t) = A(0) w(t)^(n-1)."""
    cls = CurvatureClass.parse(kappa)
    hi = 1.0 if cls.kappa == 0 else math.pi / 2
    if not 0 < depth <= hi:
        raise DepthOutOfRange(f"collar depth must lie in (0, {hi:g}], got {depth}")
    if not boundary_area > 0:
        raise ParameterError("boundary area must be positive")
    if dimension < 2:
        raise ParameterError("collar dimension must be >= 2")
    return WarpedProductCollar(boundary_area, cls, depth, dimension)


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def _check_inside(space, X):
    inside = space.contains(X)
    if not inside.all():
        bad = X[~inside][0]
        raise PointOutsideSpace(f"point {bad} lies outside {space.describe()}")


def _scalar_or_array(values, x):
    return float(values[0]) if np.ndim(x) == 1 else values


def rho(space, x):
    """Distance from ``x`` (a point or an ``(m, d)`` batch) to the boundary."""
    X = space.as_points(x)
    _check_inside(space, X)
    return _scalar_or_array(space.rho_batch(X), x)


def footpoints(space, x):
    """Every boundary point realizing rho(x), clustered at the medial threshold."""
    X = space.as_points(x)
    if len(X) != 1:
        raise ParameterError("footpoints takes a single point")
    _check_inside(space, X)
    x0 = X[0]
    C = np.atleast_2d(space.footpoint_candidates(x0))
    d = space.dist(np.broadcast_to(x0, C.shape), C)
    near = C[d <= d.min() + tol("medial_rho")]
    reps = []
    for c in near:
        if all(np.linalg.norm(c - r) > tol("medial_separation") for r in reps):
            reps.append(c)
    return np.array(reps)


def footpoint(space, x):
    """Nearest boundary point; raises :class:`MultipleFootpoints` on the medial axis."""
    reps = footpoints(space, x)
    if len(reps) > 1:
        raise MultipleFootpoints(f"{len(reps)} footpoints at {np.asarray(x)}", reps)
    return reps[0]


def _rng(seed):
    return np.random.default_rng(seed)


def _check_count(count):
    if int(count) != count or count < 1:
        raise ParameterError(f"count must be an integer >= 1, got {count}")
    return int(count)


def sample_interior(space, count, seed=0):
    """i.i.d. uniform interior samples; rejection against the space's proposal."""
    count = _check_count(count)
    rng = _rng(seed)
    direct = space._sample_interior(count, rng)
    if direct is not None:
        return direct
    out = []
    have = drawn = 0
    floor = tol("rejection_floor")
    while have < count:
        batch = max(4 * (count - have), 4096)
        X, _ = space.proposal(batch, rng)
        keep = space.contains(X)
        out.append(X[keep])
        have += int(keep.sum())
        drawn += batch
        if drawn >= 10**6 and have / drawn < floor:
            raise RejectionStarvation(f"acceptance {have / drawn:.3g} below {floor:g}")
    return np.vstack(out)[:count]


def sample_boundary(space, count, seed=0):
    """Area-weighted i.i.d. boundary samples."""
    count = _check_count(count)
    return space._sample_boundary(count, _rng(seed))


def sample_level_set(space, t, count, seed=0, step=None):
    """Samples of G(t): exact for analytic kinds, flow transport of boundary samples otherwise."""
    count = _check_count(count)
    a = space.inradius
    if t < 0 or (a is not None and t >= a):
        raise ParameterError(f"level {t} outside [0, {a})")
    rng = _rng(seed)
    exact = space._sample_level_exact(t, count, rng)
    if exact is not None:
        return exact
    P = space._sample_boundary(count, rng)
    if t == 0:
        return P
    from .flow import transport

    return transport(space, P, [t], step=step).points[:, -1]


# ---------------------------------------------------------------------------
# Config loading
# ---------------------------------------------------------------------------

_SCHEMA = {
    "EuclideanBall": {"radius"},
    "EuclideanConvexBody": {"semi_axes", "audit"},
    "SphericalCap": {"angular_radius"},
    "WarpedProductCollar": {"boundary_area", "depth"},
    "LinearCone": {"height", "base"},
    "SphericalCone": {"height", "base"},
    "SquareControl": set(),
}
_COMMON = {"kind", "dimension", "curvature_class", "name", "description"}
_KIND_CLASS = {
    "EuclideanBall": CurvatureClass.NONNEGATIVE,
    "EuclideanConvexBody": CurvatureClass.NONNEGATIVE,
    "SquareControl": CurvatureClass.NONNEGATIVE,
    "LinearCone": CurvatureClass.NONNEGATIVE,
    "SphericalCap": CurvatureClass.AT_LEAST_ONE,
    "SphericalCone": CurvatureClass.AT_LEAST_ONE,
}


def space_from_config(cfg):
    """Build a space from a parsed config mapping (see README for the schema)."""
    if not isinstance(cfg, dict):
        raise ConfigError("space config must be a mapping")
    kind = cfg.get("kind")
    if kind not in _SCHEMA:
        raise ConfigError(f"unknown space kind {kind!r}; expected one of {sorted(_SCHEMA)}")
    unknown = set(cfg) - _COMMON - _SCHEMA[kind]
    if unknown:
        raise ConfigError(f"unknown keys for {kind}: {sorted(unknown)}")
    if "dimension" not in cfg:
        raise ConfigError("space config needs 'dimension'")
    n = cfg["dimension"]
    declared = cfg.get("curvature_class")
    try:
        if declared is not None:
            declared = CurvatureClass.parse(declared)
            expected = _KIND_CLASS.get(kind)
            if expected is not None and declared is not expected:
                raise ConfigError(f"{kind} has curvature class {expected.value}, "
                                  f"config says {declared.value}")
        if kind == "EuclideanBall":
            space = EuclideanBall(n, cfg.get("radius", 1.0))
        elif kind == "EuclideanConvexBody":
            axes = cfg.get("semi_axes")
            if axes is None or len(axes) != n:
                raise ConfigError(f"semi_axes must list {n} values")
            space = Ellipsoid(axes, audit=cfg.get("audit", "strict"))
        elif kind == "SphericalCap":
            space = SphericalCap(n, cfg.get("angular_radius", math.pi / 2))
        elif kind == "SquareControl":
            space = SquareControl(n)
        elif kind == "WarpedProductCollar":
            if declared is None:
                raise ConfigError("WarpedProductCollar needs curvature_class")
            space = make_warped_collar(cfg["boundary_area"], declared, cfg["depth"], n)
        else:
            base = cfg.get("base", {"type": "round_sphere", "radius": 1.0})
            base = {"dimension": n - 1, **base}
            if base["dimension"] != n - 1:
                raise ConfigError("cone base dimension must be dimension - 1")
            space = make_cone(base, "linear" if kind == "LinearCone" else "spherical", cfg["height"])
    except KeyError as exc:
        raise ConfigError(f"{kind} config is missing {exc.args[0]!r}") from exc
    except (ParameterError, UnsupportedBase) as exc:
        raise ConfigError(str(exc)) from exc
    except CurvatureAuditError as exc:
        raise ConfigError(f"{exc} (set audit: report to keep an uncertified body)") from exc
    return space


def load_space(path):
    """Load a space config file (YAML key/value), by path or by bundled name."""
    path = Path(path)
    if not path.is_file():
        bundled = Path(__file__).resolve().parent / "data" / "spaces" / f"{path.name}.yaml"
        if path.suffix == "" and bundled.is_file():
            path = bundled
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read space config {path}: {exc}") from exc
    try:
        cfg = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed space config {path}: {exc}") from exc
    return space_from_config(cfg)
