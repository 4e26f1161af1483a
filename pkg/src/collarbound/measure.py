"""Volumes, boundary and level-set areas, and packing-based rough volume."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .closed_forms import model_warp
from .errors import MeshFailure, ParameterError, PoolTooSmall, RejectionStarvation
from .reports import make_report
from .spaces import MONTE_CARLO, Region, sample_interior
from .tolerances import tol

MC_CHUNK = 1 << 16


class Method(str, Enum):
    MONTE_CARLO = "MonteCarlo"
    ANALYTIC = "Analytic"
    COAREA = "CoareaDifference"
    PACKING = "Packing"
    MESH = "MeshRefinement"


@dataclass(frozen=True)
class MeasureEstimate:
    value: float
    std_error: float
    samples: int
    method: Method
    seed: int | None = None

    def __post_init__(self):
        if self.std_error < 0:
            raise ValueError("std_error must be nonnegative")
        if self.method is Method.ANALYTIC and self.std_error != 0:
            raise ValueError("analytic estimates carry no standard error")

    def slack(self):
        return tol("sigma_multiplier") * self.std_error

    def as_row(self, quantity):
        return {"quantity": quantity, "value": self.value, "std_error": self.std_error,
                "method": self.method.value, "samples": self.samples, "seed": self.seed}


def analytic(value):
    return MeasureEstimate(float(value), 0.0, 0, Method.ANALYTIC)


# ---------------------------------------------------------------------------
# Monte Carlo volume
# ---------------------------------------------------------------------------

def _chunks(samples, seed):
    """Independent generator per fixed-size chunk; merging is a plain sum."""
    nchunks = -(-samples // MC_CHUNK)
    children = np.random.SeedSequence(seed).spawn(nchunks)
    for i, child in enumerate(children):
        size = min(MC_CHUNK, samples - i * MC_CHUNK)
        yield np.random.default_rng(child), size


def _mc_rho_samples(space, samples, seed):
    """Proposal draws with rho at the interior ones (NaN outside) and the proposal volume."""
    space.require(MONTE_CARLO, "Monte Carlo estimation")
    parts = []
    box = None
    for rng, size in _chunks(samples, seed):
        X, box = space.proposal(size, rng)
        r = np.full(size, np.nan)
        inside = space.contains(X)
        if inside.any():
            r[inside] = space.rho_batch(X[inside])
        parts.append(r)
    r = np.concatenate(parts)
    hits = np.isfinite(r).sum()
    if hits / samples < tol("rejection_floor"):
        raise RejectionStarvation(f"acceptance {hits / samples:.3g} below the floor")
    return r, box


def _check_region(space, region):
    a = space.inradius
    if region.kind != "whole" and a is not None and region.r > a * (1 + 1e-12):
        raise ParameterError(f"region depth {region.r} exceeds the inradius {a:g}")


def volume(space, region="whole", samples=10**6, seed=0, r=None, method="auto"):
    """Volume of the whole space, of the collar B(boundary, r), or of rho^-1[0, t].

    ``method`` is ``auto`` (analytic when a closed form exists), ``analytic`` or
    ``monte_carlo``. Monte Carlo uses the acceptance fraction of the space's
    proposal times its volume, with the binomial standard error.
    """
    region = Region.parse(region, r)
    _check_region(space, region)
    if method not in ("auto", "analytic", "monte_carlo"):
        raise ParameterError(f"unknown method {method!r}")
    if region.kind != "whole" and region.r == 0:
        return analytic(0.0)
    exact = space.volume_exact(region) if method != "monte_carlo" else None
    if exact is not None:
        return analytic(exact)
    if method == "analytic":
        raise ParameterError(f"no closed-form volume for {space.describe()}")
    if samples < 1000:
        raise ParameterError("Monte Carlo volume needs at least 1000 samples")
    rv, box = _mc_rho_samples(space, samples, seed)
    hit = np.isfinite(rv)
    if region.kind != "whole":
        hit &= np.nan_to_num(rv, nan=np.inf) <= region.r
    p = hit.mean()
    return MeasureEstimate(box * p, box * math.sqrt(p * (1 - p) / samples), samples,
                           Method.MONTE_CARLO, seed)


# ---------------------------------------------------------------------------
# Boundary area
# ---------------------------------------------------------------------------

def _uv_mesh_area(space, nt):
    """Area of the triangulated radial image of a (theta, phi) grid on S^2."""
    th = np.linspace(0.0, math.pi, nt + 1)
    ph = np.linspace(0.0, 2 * math.pi, 2 * nt + 1)
    T, P = np.meshgrid(th, ph, indexing="ij")
    U = np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], axis=-1)
    V = space.radial_boundary(U.reshape(-1, 3)).reshape(U.shape)
    a, b = V[:-1, :-1], V[1:, :-1]
    c, d = V[1:, 1:], V[:-1, 1:]
    t1 = 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=-1)
    t2 = 0.5 * np.linalg.norm(np.cross(c - a, d - a), axis=-1)
    return float(t1.sum() + t2.sum())


def _polygon_length(space, nt):
    ph = np.linspace(0.0, 2 * math.pi, nt + 1)
    V = space.radial_boundary(np.stack([np.cos(ph), np.sin(ph)], axis=-1))
    return float(np.linalg.norm(np.diff(V, axis=0), axis=-1).sum())


def boundary_area(space, samples=None, seed=0, resolution=128):
    """(n-1)-measure of the boundary.

    Closed form where known. Implicit bodies are triangulated through their
    radial parametrization at two uniform refinements and Richardson
    extrapolated (the inscribed mesh error is second order); the standard
    error is the extrapolation correction.
    """
    exact = space.boundary_area_exact()
    if exact is not None:
        return analytic(exact)
    if not hasattr(space, "radial_boundary"):
        raise MeshFailure(f"no boundary parametrization for {space.describe()}")
    n = space.dimension
    if n == 2:
        coarse, fine = _polygon_length(space, 4 * resolution), _polygon_length(space, 8 * resolution)
    elif n == 3:
        coarse, fine = _uv_mesh_area(space, resolution), _uv_mesh_area(space, 2 * resolution)
    else:
        raise MeshFailure("boundary triangulation is implemented for n <= 3")
    if not (math.isfinite(coarse) and math.isfinite(fine)) or fine < coarse * (1 - 1e-3):
        raise MeshFailure("mesh refinement is not converging")
    extrap = fine + (fine - coarse) / 3.0
    return MeasureEstimate(extrap, abs(extrap - fine), 0, Method.MESH)


# ---------------------------------------------------------------------------
# Co-area profile
# ---------------------------------------------------------------------------

@dataclass
class AreaProfile:
    t: np.ndarray
    area: np.ndarray
    std_error: np.ndarray
    reference: np.ndarray | None
    method: Method
    samples: int = 0
    volume: np.ndarray | None = None

    def __post_init__(self):
        if (np.diff(self.t) <= 0).any():
            raise ValueError("t grid must be strictly increasing")

    def rows(self):
        ref = self.reference if self.reference is not None else np.full_like(self.t, np.nan)
        return list(zip(self.t, self.area, self.std_error, ref))


def default_grid(space, levels=64):
    a = space.inradius
    if a is None:
        raise ParameterError("default grid needs a known inradius")
    return np.linspace(0.0, a * (1 - 1.0 / levels), levels)


def model_profile(kappa, n, A0, t):
    """Comparison area A*(t) = A(0) w(t)^(n-1)."""
    w = np.vectorize(lambda s: model_warp(kappa, s))(np.asarray(t, dtype=float))
    return A0 * w ** (n - 1)


def area_profile(space, t_grid=None, samples=10**6, seed=0, method="auto"):
    """Level-set areas A(t) on a grid, with the comparison profile A*(t).

    Monte Carlo path: V(t) = vol(rho <= t) on the grid, A = D V with the
    second-order finite-difference matrix D on the grid (central inside,
    one-sided at the ends). Each sample's contribution to A(t_j) is a fixed
    function of its rho, which gives the exact mean and standard error.
    """
    t = default_grid(space) if t_grid is None else np.asarray(t_grid, dtype=float)
    a = space.inradius
    if t.ndim != 1 or len(t) < 3 or (np.diff(t) <= 0).any() or t[0] < 0:
        raise ParameterError("t grid must be increasing, nonnegative, with >= 3 levels")
    if a is not None and t[-1] >= a:
        raise ParameterError(f"t grid must stay below the inradius {a:g}")
    A0 = boundary_area(space).value
    ref = model_profile(space.kappa, space.dimension, A0, t)
    if method in ("auto", "analytic") and space.level_area_exact(0.0) is not None:
        area = np.array([space.level_area_exact(s) for s in t])
        return AreaProfile(t, area, np.zeros_like(t), ref, Method.ANALYTIC)
    if method == "analytic":
        raise ParameterError(f"no closed-form level areas for {space.describe()}")
    rv, box = _mc_rho_samples(space, samples, seed)
    K = len(t)
    C = np.gradient(np.eye(K), t, axis=0, edge_order=2)
    # coef[b, j]: weight of a sample in bin b (t[b-1] < rho <= t[b]) for A(t_j).
    rev = np.cumsum(C[:, ::-1], axis=1)[:, ::-1]
    coef = np.vstack([rev.T, np.zeros((1, K))])
    r_in = rv[np.isfinite(rv)]
    bins = np.searchsorted(t, r_in, side="left")
    counts = np.bincount(bins, minlength=K + 1)
    mean = counts @ coef / samples
    second = counts @ coef**2 / samples
    var = np.maximum(second - mean**2, 0.0)
    area = box * mean
    err = box * np.sqrt(var / samples)
    vol = box * np.cumsum(counts[:K]) / samples
    return AreaProfile(t, area, err, ref, Method.COAREA, samples, vol)


# ---------------------------------------------------------------------------
# Lipschitz image bound
# ---------------------------------------------------------------------------

def lipschitz_image_bound_check(L, source_measure, image_measure, d, space=None, parameters=None):
    """Check mu_d(f(X)) <= L^d mu_d(X) with 3-sigma slack (plus a relative analytic term)."""
    if not L > 0:
        raise ParameterError("Lipschitz constant must be positive")
    bound = L**d * source_measure.value
    k = tol("sigma_multiplier")
    err = math.hypot(L**d * source_measure.std_error, image_measure.std_error)
    det = tol("analytic_rel") * max(abs(bound), abs(image_measure.value))
    params = {"L": L, "d": d, **(parameters or {})}
    return make_report("level_area", space, params, bound, image_measure.value, err,
                       k * err, det, "le")


# ---------------------------------------------------------------------------
# Packing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PackingRow:
    eps: float
    beta: int
    scaled: float
    pool: int


def greedy_packing(points, eps, metric="euclidean"):
    """Indices of a greedy eps-separated, pool-maximal subset (row order)."""
    if not eps > 0:
        raise ParameterError("eps must be positive")
    return _kernels.greedy_pack(np.asarray(points, dtype=float), float(eps), metric == "sphere")


def rough_volume(space, eps_schedule, seed=0, pool=None, dimension=None, pool_cap=200_000,
                 pool_factor=50.0):
    """Greedy packing numbers beta(eps) and the scaled trend eps^n beta(eps).

    The pool holds ceil(pool_factor / eps^n) interior samples for the smallest
    eps (the same pool serves every eps). A caller-supplied ``pool`` replaces
    sampling; ``dimension`` then defaults to its column count.
    """
    eps = np.asarray(eps_schedule, dtype=float)
    if eps.ndim != 1 or len(eps) == 0 or (eps <= 0).any() or (np.diff(eps) >= 0).any():
        raise ParameterError("eps schedule must be positive and strictly decreasing")
    if eps[-1] < tol("chord_floor"):
        raise ParameterError("eps schedule bottoms out below the resolution floor")
    if pool is None:
        n = space.dimension
        need = math.ceil(pool_factor / eps[-1] ** n)
        if need > pool_cap:
            raise PoolTooSmall(f"eps = {eps[-1]:g} needs a pool of {need} > cap {pool_cap}")
        pool = sample_interior(space, need, seed)
        metric = space.metric
    else:
        pool = np.asarray(pool, dtype=float)
        if pool.ndim == 1:
            pool = pool[:, None]
        n = dimension if dimension is not None else pool.shape[1]
        metric = "euclidean" if space is None else space.metric
    rows = []
    for e in eps:
        beta = len(greedy_packing(pool, e, metric))
        rows.append(PackingRow(float(e), beta, float(e**n * beta), len(pool)))
    return rows


def packing_spread(rows):
    """Relative change of eps^n beta(eps) across the last two schedule entries."""
    if len(rows) < 2:
        return 0.0
    a, b = rows[-2].scaled, rows[-1].scaled
    return abs(b - a) / max(abs(b), 1e-300)
