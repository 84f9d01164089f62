"""Analytic 2D Fourier transforms of the peak shapes and their
multi-peak superposition.

Transform convention: F(q) = (1/2pi) * integral V(r) exp(-i q.r) d^2r.
Every downstream prefactor assumes exactly this normalization, so do not
touch it. For the radial shapes used here the single-peak transform is
real:

    gaussian             V0 exp(-r^2/D^2)              -> (V0 D^2/2) exp(-(qD)^2/4)
    polynomial_gaussian  V0 (1 - r^2/D^2) exp(-r^2/D^2) -> (V0 q^2 D^4/8) exp(-(qD)^2/4)

A peak shifted to center c picks up exp(-i q_x c).
"""

from __future__ import annotations

import math

import numpy as np

from .model import (  # noqa: F401  (make_grating re-exported on purpose)
    GAUSSIAN,
    POLYNOMIAL_GAUSSIAN,
    PeakShape,
    PotentialSpec,
    make_grating,
)

# |sin(x/2)| below this switches the grating factor to reduced arguments
_RATIO_MIN_S = 0.1
# (2N+1)*|u| below this switches further to the Taylor series
_SERIES_Y = 0.02


def ft_peak(shape: PeakShape, q_mag: float) -> float:
    """Single-peak transform at radial momentum transfer q_mag >= 0."""
    t = q_mag * shape.width
    base = 0.5 * shape.strength * shape.width * shape.width * math.exp(-0.25 * t * t)
    if shape.variant == GAUSSIAN:
        return base
    return 0.25 * t * t * base


def ft_peak_grid(shape: PeakShape, q_mag: np.ndarray) -> np.ndarray:
    t = q_mag * shape.width
    base = 0.5 * shape.strength * shape.width * shape.width * np.exp(-0.25 * t * t)
    if shape.variant == GAUSSIAN:
        return base
    return 0.25 * t * t * base


def ft_total(spec: PotentialSpec, q_x: float, q_y: float) -> complex:
    """Transform of the whole potential at q = (q_x, q_y).

    Exact summation (fsum) makes the value independent of peak order,
    bit for bit. For center sets symmetric under x -> -x the imaginary
    part cancels exactly and values at +-q_x are complex conjugates.
    """
    q = math.hypot(q_x, q_y)
    cache = {}
    res = []
    ims = []
    for p in spec.peaks:
        ft = cache.get(p.shape)
        if ft is None:
            ft = ft_peak(p.shape, q)
            cache[p.shape] = ft
        a = q_x * p.center_x
        res.append(ft * math.cos(a))
        ims.append(-ft * math.sin(a))
    return complex(math.fsum(res), math.fsum(ims))


def ft_total_grid(spec: PotentialSpec, q_x: np.ndarray, q_y: np.ndarray):
    """(re, im) arrays of the total transform over a grid.

    Peaks are folded in a canonical sorted order so the result does not
    depend on how the peak list was assembled.
    """
    q = np.hypot(q_x, q_y)
    order = sorted(
        range(len(spec.peaks)),
        key=lambda i: (spec.peaks[i].center_x, spec.peaks[i].shape.variant,
                       spec.peaks[i].shape.strength, spec.peaks[i].shape.width),
    )
    cache = {}
    re = np.zeros_like(q)
    im = np.zeros_like(q)
    for i in order:
        p = spec.peaks[i]
        ft = cache.get(p.shape)
        if ft is None:
            ft = ft_peak_grid(p.shape, q)
            cache[p.shape] = ft
        a = q_x * p.center_x
        re = re + ft * np.cos(a)
        im = im - ft * np.sin(a)
    return re, im


def _dirichlet_coeffs(m: int):
    mm = float(m * m)
    c2 = (mm - 1.0) / 6.0
    c4 = 7.0 / 360.0 - mm / 36.0 + mm * mm / 120.0
    return c2, c4


def dirichlet_amplitude(x: float, half_count: int) -> float:
    """sin((2N+1)x/2)/sin(x/2) for a 2N+1-peak grating, N = half_count.

    The direct ratio is inaccurate near the revivals x = 0 mod 2pi: the
    float product (2N+1)*x/2 lands next to a zero of sin with an absolute
    argument error of order ulp, which the small denominator then
    amplifies. Below |sin(x/2)| = 0.1 the argument is therefore reduced
    to u = x/2 - pi*round(x/2pi) first, and the value comes from
    sin((2N+1)u)/sin(u), or from its Taylor series once (2N+1)|u| is
    tiny. Peaks at 2N+1, reached at x = 0; identically 1 for one peak.
    Relative error stays near 1e-15, growing to ~1e-12 by |x| ~ 1e3.
    """
    if not isinstance(half_count, int) or half_count < 0:
        raise ValueError("half_count must be an integer >= 0")
    if half_count == 0:
        return 1.0
    m = 2 * half_count + 1
    h = 0.5 * x
    s = math.sin(h)
    if abs(s) >= _RATIO_MIN_S:
        return math.sin(m * h) / s
    u = h - math.pi * round(x / (2.0 * math.pi))
    y = m * u
    if abs(y) < _SERIES_Y:
        c2, c4 = _dirichlet_coeffs(m)
        u2 = u * u
        return m * (1.0 - c2 * u2 + c4 * (u2 * u2))
    # sign: sin(m(pi j + u)) = (-1)^j sin(mu) for odd m, matching the
    # (-1)^j of the denominator
    return math.sin(y) / math.sin(u)


def dirichlet_amplitude_grid(x: np.ndarray, half_count: int) -> np.ndarray:
    """Same values as dirichlet_amplitude, element for element."""
    if not isinstance(half_count, int) or half_count < 0:
        raise ValueError("half_count must be an integer >= 0")
    x = np.asarray(x, dtype=float)
    if half_count == 0:
        return np.ones_like(x)
    m = 2 * half_count + 1
    h = 0.5 * x
    s = np.sin(h)
    out = np.empty_like(h)
    plain = np.abs(s) >= _RATIO_MIN_S
    out[plain] = np.sin(m * h[plain]) / s[plain]
    near = ~plain
    if near.any():
        u = h[near] - np.pi * np.round(x[near] / (2.0 * np.pi))
        y = m * u
        c2, c4 = _dirichlet_coeffs(m)
        u2 = u * u
        series = m * (1.0 - c2 * u2 + c4 * (u2 * u2))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.sin(y) / np.sin(u)
        out[near] = np.where(np.abs(y) < _SERIES_Y, series, ratio)
    return out
