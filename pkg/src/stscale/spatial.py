"""Spatial down-scaling error from a truncated frame power spectrum.

Frames are a separable first-order Markov field on the unit square, whose
PSD is a product of two Lorentzians. Sampling at the original size keeps the
band ``|w| <= pi*W0``; down-scaling by ``D`` keeps ``|w| <= pi*W0/D``. The
down-scaling MSE is the spectral power in between.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_scalar
from .stats import RHO_MAX

RHO_MIN = 1e-9


def alpha_from_rho(rho, length):
    """Exponential decay rate ``-length * log(rho)``; ``inf`` when ``rho == 0``."""
    if rho <= 0.0:
        return math.inf
    return -length * math.log(min(rho, RHO_MAX))


@dataclass(frozen=True)
class FramePsdParams:
    sigma_v2: float
    alpha_x: float
    alpha_y: float
    w0: float
    h0: float

    def __post_init__(self):
        check_scalar(self.sigma_v2, "sigma_v2", min_val=0)
        check_scalar(self.alpha_x, "alpha_x", min_val=0, include_min=False)
        check_scalar(self.alpha_y, "alpha_y", min_val=0, include_min=False)

    @classmethod
    def from_stats(cls, stats):
        # keep alpha finite on both ends: rho -> 1 means nothing is lost,
        # rho -> 0 means a white (but still finite-power) frame
        rx = min(max(stats.rho_vx, RHO_MIN), RHO_MAX)
        ry = min(max(stats.rho_vy, RHO_MIN), RHO_MAX)
        return cls(
            sigma_v2=stats.sigma_v2,
            alpha_x=alpha_from_rho(rx, stats.width),
            alpha_y=alpha_from_rho(ry, stats.height),
            w0=stats.width,
            h0=stats.height,
        )


def psd(params, omega_x, omega_y):
    """Separable Lorentzian PSD; accepts scalars or arrays."""
    ax, ay = params.alpha_x, params.alpha_y
    wx = np.asarray(omega_x, dtype=float)
    wy = np.asarray(omega_y, dtype=float)
    out = 4.0 * params.sigma_v2 * ax * ay / ((ax * ax + wx * wx) * (ay * ay + wy * wy))
    return out if out.ndim else float(out)


def _atan_span(w1, w2, alpha):
    # difference form; math.atan(inf) = pi/2 handles unbounded strips
    return math.atan(w2 / alpha) - math.atan(w1 / alpha)


def integral_I(omega_x1, omega_x2, omega_y1, omega_y2, alpha_x, alpha_y):
    """Integral of the unit-variance PSD over ``[wx1, wx2] x [wy1, wy2]``."""
    return 4.0 * _atan_span(omega_x1, omega_x2, alpha_x) * _atan_span(omega_y1, omega_y2, alpha_y)


def band_limits(params, d_m, d_n):
    """``(wx0, wy0, wxd, wyd)``: half sampling frequencies before/after scaling."""
    wx0 = math.pi * params.w0
    wy0 = math.pi * params.h0
    return wx0, wy0, wx0 / d_m, wy0 / d_n


def spatial_scaling_mse(params, d_m, d_n):
    """Power of the frame spectrum lost by down-scaling with ``(d_m, d_n)``.

    Sum over the three rectangles that tile ``A0 \\ Ad`` in the first
    quadrant; the even PSD makes the four quadrants identical.
    """
    d_m = check_scalar(d_m, "d_m", min_val=1)
    d_n = check_scalar(d_n, "d_n", min_val=1)
    if d_m == 1.0 and d_n == 1.0:
        return 0.0
    wx0, wy0, wxd, wyd = band_limits(params, d_m, d_n)
    ax, ay = params.alpha_x, params.alpha_y
    corner = integral_I(wxd, wx0, wyd, wy0, ax, ay)
    x_strip = integral_I(wxd, wx0, 0.0, wyd, ax, ay)
    y_strip = integral_I(0.0, wxd, wyd, wy0, ax, ay)
    return params.sigma_v2 / math.pi ** 2 * (corner + x_strip + y_strip)
