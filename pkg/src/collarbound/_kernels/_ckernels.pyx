# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: ellipsoid projection and greedy packing."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, asin, fabs, fmin

cnp.import_array()

DEF MAX_ITER = 100
DEF GROUP_RTOL = 1e-14
DEF PHI_TOL = 1e-14
DEF BRACKET_RTOL = 2e-15


cdef inline double fmax0(double v) nogil:
    return v if v > 0.0 else 0.0


def ellipsoid_project(X, axes):
    cdef double[:, ::1] x = np.ascontiguousarray(X, dtype=np.float64)
    cdef double[::1] a = np.ascontiguousarray(axes, dtype=np.float64)
    cdef Py_ssize_t m = x.shape[0], n = x.shape[1]
    cdef Py_ssize_t i, j, it, first = -1
    cdef double[::1] a2 = np.empty(n)
    cdef double[::1] d = np.empty(n)
    cdef char[::1] grp = np.zeros(n, dtype=np.int8)
    cdef double am2 = 1e300, am
    for j in range(n):
        a2[j] = a[j] * a[j]
        if a2[j] < am2:
            am2 = a2[j]
    am = sqrt(am2)
    for j in range(n):
        d[j] = a2[j] - am2
        if d[j] <= GROUP_RTOL * am2:
            d[j] = 0.0
            grp[j] = 1
            if first < 0:
                first = j

    rho_arr = np.zeros(m)
    Y_arr = np.array(x, copy=True)
    conv_arr = np.ones(m, dtype=np.bool_)
    cdef double[::1] rho = rho_arr
    cdef double[:, ::1] Y = Y_arr
    cdef cnp.npy_bool[::1] conv = conv_arr

    cdef double g, xg, s_rest, c, den, S, dS, phi, dphi, lo, hi, mu, cand, acc, t
    cdef bint ok
    for i in range(m):
        g = -1.0
        xg = 0.0
        for j in range(n):
            g += x[i, j] * x[i, j] / a2[j]
            if grp[j]:
                xg += x[i, j] * x[i, j]
        xg = sqrt(xg)
        if g >= 0.0:
            t = sqrt(g + 1.0)
            for j in range(n):
                Y[i, j] = x[i, j] / t
            rho[i] = 0.0
            continue
        if xg == 0.0:
            s_rest = 0.0
            for j in range(n):
                if not grp[j]:
                    c = a[j] * x[i, j] / d[j]
                    s_rest += c * c
            if s_rest <= 1.0:
                acc = 0.0
                for j in range(n):
                    if grp[j]:
                        Y[i, j] = 0.0
                    else:
                        Y[i, j] = a2[j] * x[i, j] / d[j]
                Y[i, first] = am * sqrt(fmax0(1.0 - s_rest))
                for j in range(n):
                    t = x[i, j] - Y[i, j]
                    acc += t * t
                rho[i] = sqrt(acc)
                continue
        lo = am * xg
        hi = am2
        mu = 0.5 * (lo + hi)
        ok = False
        for it in range(MAX_ITER):
            S = 0.0
            dS = 0.0
            for j in range(n):
                den = d[j] + mu
                c = a2[j] * x[i, j] * x[i, j] / (den * den)
                S += c
                dS += c / den
            phi = 1.0 / sqrt(S) - 1.0
            dphi = dS / (S * sqrt(S))
            if phi < 0.0:
                lo = mu
            else:
                hi = mu
            if fabs(phi) <= PHI_TOL or hi - lo <= BRACKET_RTOL * hi:
                ok = True
                break
            if dphi > 0.0:
                cand = mu - phi / dphi
            else:
                cand = lo
            if cand <= lo or cand >= hi:
                cand = 0.5 * (lo + hi)
            mu = cand
        conv[i] = ok
        acc = 0.0
        for j in range(n):
            den = d[j] + mu
            Y[i, j] = a2[j] * x[i, j] / den
            t = x[i, j] * (mu - am2) / den
            acc += t * t
        rho[i] = sqrt(acc)
    return rho_arr, Y_arr, conv_arr


def greedy_pack(P, double eps, bint spherical=False):
    cdef double[:, ::1] p = np.ascontiguousarray(P, dtype=np.float64)
    cdef Py_ssize_t m = p.shape[0], n = p.shape[1]
    keep_arr = np.empty(m, dtype=np.intp)
    cdef Py_ssize_t[::1] keep = keep_arr
    cdef Py_ssize_t i, j, q, t_idx, k = 0
    cdef double s, t, dist
    cdef bint sep
    for i in range(m):
        sep = True
        for q in range(k):
            j = keep[q]
            s = 0.0
            for t_idx in range(n):
                t = p[j, t_idx] - p[i, t_idx]
                s += t * t
            if spherical:
                dist = 2.0 * asin(fmin(sqrt(s) * 0.5, 1.0))
            else:
                dist = sqrt(s)
            if dist < eps:
                sep = False
                break
        if sep:
            keep[k] = i
            k += 1
    return keep_arr[:k].copy()
