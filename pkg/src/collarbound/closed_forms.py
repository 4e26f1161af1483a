"""Closed-form measures of round spheres and warping integrals."""

from __future__ import annotations

import math


def unit_ball_volume(n):
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def sphere_area(m):
    """Area of the unit m-sphere S^m in R^{m+1}."""
    return 2 * math.pi ** ((m + 1) / 2) / math.gamma((m + 1) / 2)


def linear_power_integral(m, a, b):
    """Integral of (1 - t)^m over [a, b]."""
    return ((1 - a) ** (m + 1) - (1 - b) ** (m + 1)) / (m + 1)


def power_integral(m, a, b):
    """Integral of t^m over [a, b]."""
    return (b ** (m + 1) - a ** (m + 1)) / (m + 1)


def cos_power_integral(m, a, b):
    """Integral of cos(t)^m over [a, b], by the reduction formula."""
    if m == 0:
        return b - a
    if m == 1:
        return math.sin(b) - math.sin(a)
    head = (math.cos(b) ** (m - 1) * math.sin(b) - math.cos(a) ** (m - 1) * math.sin(a)) / m
    return head + (m - 1) / m * cos_power_integral(m - 2, a, b)


def sin_power_integral(m, a, b):
    """Integral of sin(t)^m over [a, b], by the reduction formula."""
    if m == 0:
        return b - a
    if m == 1:
        return math.cos(a) - math.cos(b)
    head = (math.sin(a) ** (m - 1) * math.cos(a) - math.sin(b) ** (m - 1) * math.cos(b)) / m
    return head + (m - 1) / m * sin_power_integral(m - 2, a, b)


def model_warp(kappa, t):
    """Warping factor of the comparison collar at depth t: 1 - t or cos t."""
    return 1.0 - t if kappa == 0 else math.cos(t)


def model_warp_integral(kappa, m, a, b):
    """Integral of warp(t)^m over [a, b]."""
    if kappa == 0:
        return linear_power_integral(m, a, b)
    return cos_power_integral(m, a, b)


def model_inradius(kappa):
    return 1.0 if kappa == 0 else math.pi / 2
