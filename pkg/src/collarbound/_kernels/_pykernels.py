"""Pure numpy implementations of the hot kernels.

These mirror ``_ckernels.pyx`` one for one and are selected when the compiled
extension is unavailable (or forced via ``COLLARBOUND_PURE_PYTHON=1``).
"""

from __future__ import annotations

import numpy as np

MAX_ITER = 100
_GROUP_RTOL = 1e-14
# |phi| carries a few ulps of rounding noise near the root; stop well above it.
_PHI_TOL = 1e-14
_BRACKET_RTOL = 2e-15


def ellipsoid_project(X, axes):
    """Nearest boundary point of the ellipsoid ``sum(x_i^2 / a_i^2) <= 1``.

    Solves the secular equation in the shifted multiplier ``mu = a_min^2 + lambda``
    with a safeguarded Newton iteration on ``1/sqrt(S(mu)) - 1``, which is close
    to linear in ``mu``.

    Parameters
    ----------
    X : (m, n) array of interior points.
    axes : (n,) semi-axes.

    Returns
    -------
    rho : (m,) distances to the boundary.
    Y : (m, n) footpoints.
    converged : (m,) bool.
    """
    X = np.ascontiguousarray(X, dtype=float)
    a = np.asarray(axes, dtype=float)
    m, n = X.shape
    a2 = a * a
    am2 = a2.min()
    am = np.sqrt(am2)
    d = a2 - am2
    group = d <= _GROUP_RTOL * am2
    d[group] = 0.0
    c2 = (a * X) ** 2  # (a_i x_i)^2

    xg = np.sqrt((X[:, group] ** 2).sum(axis=1))
    gval = (X * X / a2).sum(axis=1) - 1.0

    rho = np.zeros(m)
    Y = X.copy()
    converged = np.ones(m, dtype=bool)

    outside = gval >= 0.0
    if outside.any():
        Y[outside] = X[outside] / np.sqrt(gval[outside] + 1.0)[:, None]

    # Exactly on the medial set of the smallest axis: footpoint pair at mu = 0.
    degenerate = (~outside) & (xg == 0.0)
    if degenerate.any():
        rest = ~group
        with np.errstate(divide="ignore", invalid="ignore"):
            s_rest = np.where(rest, c2[degenerate] / np.where(rest, d, 1.0) ** 2, 0.0).sum(axis=1)
        flat = s_rest <= 1.0
        idx = np.flatnonzero(degenerate)[flat]
        if idx.size:
            Yd = np.zeros((idx.size, n))
            Yd[:, rest] = a2[rest] * X[idx][:, rest] / d[rest]
            first = np.flatnonzero(group)[0]
            Yd[:, first] = am * np.sqrt(np.maximum(1.0 - s_rest[flat], 0.0))
            Y[idx] = Yd
            rho[idx] = np.sqrt(((X[idx] - Yd) ** 2).sum(axis=1))
        degenerate[np.flatnonzero(degenerate)[~flat]] = False

    work = np.flatnonzero(~outside & ~degenerate)
    if work.size:
        cw = c2[work]
        lo = am * xg[work]
        hi = np.full(work.size, am2)
        mu = 0.5 * (lo + hi)
        done = np.zeros(work.size, dtype=bool)
        for _ in range(MAX_ITER):
            den = d[None, :] + mu[:, None]
            S = (cw / den**2).sum(axis=1)
            dS = (cw / den**3).sum(axis=1)  # = -S'/2
            phi = 1.0 / np.sqrt(S) - 1.0
            dphi = dS * S**-1.5
            neg = phi < 0.0
            lo = np.where(neg & ~done, mu, lo)
            hi = np.where(~neg & ~done, mu, hi)
            step = np.where(dphi > 0.0, phi / np.where(dphi > 0.0, dphi, 1.0), 0.0)
            cand = mu - step
            bad = (cand <= lo) | (cand >= hi) | ~(dphi > 0.0)
            cand = np.where(bad, 0.5 * (lo + hi), cand)
            small = (np.abs(phi) <= _PHI_TOL) | (hi - lo <= _BRACKET_RTOL * hi)
            done |= small
            mu = np.where(done, mu, cand)
            if done.all():
                break
        converged[work] = done
        den = d[None, :] + mu[:, None]
        Xw = X[work]
        Y[work] = a2[None, :] * Xw / den
        rho[work] = np.sqrt(((Xw * (mu[:, None] - am2) / den) ** 2).sum(axis=1))
    return rho, Y, converged


def greedy_pack(P, eps, spherical=False):
    """Indices of a greedy eps-separated subset of ``P`` taken in row order.

    Euclidean distance by default; great-circle distance between unit vectors
    when ``spherical``.
    """
    P = np.ascontiguousarray(P, dtype=float)
    m = P.shape[0]
    keep = np.empty(m, dtype=np.intp)
    acc = np.empty_like(P)
    k = 0
    for i in range(m):
        p = P[i]
        if k:
            diff = acc[:k] - p
            if spherical:
                chord = np.sqrt((diff * diff).sum(axis=1))
                dist = 2.0 * np.arcsin(np.minimum(chord * 0.5, 1.0))
            else:
                dist = np.sqrt((diff * diff).sum(axis=1))
            if dist.min() < eps:
                continue
        acc[k] = p
        keep[k] = i
        k += 1
    return keep[:k].copy()
