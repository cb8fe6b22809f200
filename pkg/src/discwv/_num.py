"""Shared numeric helpers: cancellation-safe complex log1p/expm1, golden-section
maximization, log-linear interpolation, deterministic probe layouts."""

from __future__ import annotations

import cmath
import math

import numpy as np

# Threshold below which the power series beats direct log(1+w) / exp(w)-1.
_SMALL = 1e-4

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def clog1p(w):
    """log(1+w) for complex w, accurate when |w| is tiny.

    Accepts a scalar or ndarray; scalars come back as python complex.
    """
    arr = np.asarray(w, dtype=np.complex128)
    out = np.empty_like(arr)
    small = np.abs(arr) < _SMALL
    ws = arr[small]
    # w - w^2/2 + w^3/3 - w^4/4; next term is O(|w|^5) <= 2e-21 here
    out[small] = ws * (1.0 - ws * (0.5 - ws * (1.0 / 3.0 - ws * 0.25)))
    wb = arr[~small]
    out[~small] = np.log(1.0 + wb)
    if out.ndim == 0:
        return complex(out)
    return out


def cexpm1(w):
    """exp(w) - 1 for complex w, accurate when |w| is tiny."""
    arr = np.asarray(w, dtype=np.complex128)
    out = np.empty_like(arr)
    small = np.abs(arr) < _SMALL
    ws = arr[small]
    out[small] = ws * (1.0 + ws * (0.5 + ws * (1.0 / 6.0 + ws * (1.0 / 24.0))))
    wb = arr[~small]
    out[~small] = np.exp(wb) - 1.0
    if out.ndim == 0:
        return complex(out)
    return out


def wrap_angle(phi: float) -> float:
    """Reduce an angle to the principal interval (-pi, pi]."""
    out = math.fmod(phi, 2.0 * math.pi)
    if out > math.pi:
        out -= 2.0 * math.pi
    elif out <= -math.pi:
        out += 2.0 * math.pi
    return out


def golden_max(fn, lo: float, hi: float, xtol: float = 1e-12, max_iter: int = 200):
    """Golden-section maximization of a scalar function on [lo, hi].

    Returns (x_best, f_best) over every point actually evaluated, so a noisy
    objective can never return less than the best observed sample.
    """
    a, b = float(lo), float(hi)
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    best_x, best_f = (c, fc) if fc >= fd else (d, fd)
    it = 0
    while (b - a) > xtol and it < max_iter:
        if fc < fd:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fn(d)
            if fd > best_f:
                best_x, best_f = d, fd
        else:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fn(c)
            if fc > best_f:
                best_x, best_f = c, fc
        it += 1
    return best_x, best_f


def disc_offsets(radius: float, n_rings: int = 8, n_rays: int = 32,
                 include_center: bool = True) -> np.ndarray:
    """Deterministic probe offsets covering the open disc of the given radius.

    Rings sit at the midpoint fractions (2j-1)/(2*n_rings) of the radius so the
    outermost ring (15/16 for 8 rings) hugs the boundary while staying strictly
    interior. Order: center (optional), then ring-major, ray-minor.
    """
    fracs = (2.0 * np.arange(1, n_rings + 1) - 1.0) / (2.0 * n_rings)
    rays = np.exp(2j * math.pi * np.arange(n_rays) / n_rays)
    grid = (radius * fracs[:, None] * rays[None, :]).ravel()
    if include_center:
        return np.concatenate(([0.0 + 0.0j], grid))
    return grid


def ls_slope(x, y) -> float:
    """Least-squares slope of y against x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xm = x - x.mean()
    denom = float(np.dot(xm, xm))
    if denom == 0.0:
        return 0.0
    return float(np.dot(xm, y - y.mean()) / denom)


class LogLinearInterp:
    """Piecewise-linear interpolation of log(y) against x for positive y.

    Exact on geometric data (y = C*e^(k*x)); for monotone y the interpolant is
    monotone. Queries outside the sample range clamp to the end values.
    """

    def __init__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if np.any(y <= 0.0):
            raise ValueError("log-linear interpolation needs positive values")
        self._x = x
        self._ly = np.log(y)

    def __call__(self, xq):
        out = np.exp(np.interp(xq, self._x, self._ly))
        if np.ndim(xq) == 0:
            return float(out)
        return out

    @property
    def x_min(self) -> float:
        return float(self._x[0])

    @property
    def x_max(self) -> float:
        return float(self._x[-1])
