"""Second-order statistics of the motion-compensated prediction residual.

The residual is a separable Markov field whose variance grows with motion
complexity, ME inaccuracy, temporal distance between coded frames, and the
temporally-local noise of the current and reference frames (spatial
down-scaling noise in both, plus compression noise in the reference).
"""

from dataclasses import dataclass
from typing import Optional

from ._validation import check_scalar
from .exceptions import ValidationError
from .stats import DEFAULT_ME_VARIANCE, RHO_MAX

COMPRESSION_NOISE_MODES = ("gaussian", "empirical")


@dataclass(frozen=True)
class ResidualParams:
    """ME and coding constants for one operating point.

    ``sigma_dx2``/``sigma_dy2`` are ME error variances in squared pels of the
    original raster; ``eps_x``/``eps_y`` are the original pixel widths on the
    unit square (``1/W0``, ``1/H0``). ``d_t`` defaults to the inter-frame
    interval of the coded (scaled) video.
    """

    eps_x: float
    eps_y: float
    sigma_dx2: float = DEFAULT_ME_VARIANCE
    sigma_dy2: float = DEFAULT_ME_VARIANCE
    L: float = 100.0
    d_t: Optional[float] = None
    gamma_skip: float = 2.0
    k_quant: float = 1.5

    def __post_init__(self):
        for name in ("sigma_dx2", "sigma_dy2", "L"):
            check_scalar(getattr(self, name), name, min_val=0)
        for name in ("eps_x", "eps_y"):
            check_scalar(getattr(self, name), name, min_val=0, include_min=False)
        if self.d_t is not None:
            check_scalar(self.d_t, "d_t", min_val=0)
        check_scalar(self.gamma_skip, "gamma_skip", min_val=1)
        check_scalar(self.k_quant, "k_quant", min_val=1, max_val=3)

    @classmethod
    def for_stats(cls, stats, **kw):
        return cls(eps_x=1.0 / stats.width, eps_y=1.0 / stats.height, **kw)

    def me_gradient_weight(self):
        """``sigma_dx2/eps_x**2 + sigma_dy2/eps_y**2`` with variances on the unit square."""
        var_x = self.sigma_dx2 * self.eps_x ** 2  # pel^2 -> unit-square
        var_y = self.sigma_dy2 * self.eps_y ** 2
        return var_x / self.eps_x ** 2 + var_y / self.eps_y ** 2


@dataclass(frozen=True)
class NoiseState:
    sigma_w_current2: float
    sigma_w_ref2: float

    def __post_init__(self):
        check_scalar(self.sigma_w_current2, "sigma_w_current2", min_val=0)
        check_scalar(self.sigma_w_ref2, "sigma_w_ref2", min_val=0)

    @classmethod
    def from_components(cls, spatial_scaling, compression):
        """Current frame sees scaling noise only; the reference sees both."""
        return cls(spatial_scaling, spatial_scaling + compression)


def compression_noise(mode, r, sigma_v2, alpha=None, beta=None):
    """Reference-frame compression noise at ``r`` bits per pixel.

    ``gaussian``: distortion-rate bound of a memoryless Gaussian source.
    ``empirical``: fitted power law ``beta * r**-alpha``.
    """
    if mode == "gaussian":
        r = check_scalar(r, "r", min_val=0)
        return sigma_v2 * 2.0 ** (-2.0 * r)
    if mode == "empirical":
        r = check_scalar(r, "r", min_val=0, include_min=False)
        if alpha is None or beta is None:
            raise ValidationError("empirical compression noise needs rd_alpha and rd_beta")
        return beta * r ** (-alpha)
    raise ValidationError(f"unknown compression noise mode {mode!r}; "
                          f"expected one of {COMPRESSION_NOISE_MODES}")


def residual_variance(stats, params, noise, f_rate_scaled):
    f = check_scalar(f_rate_scaled, "f_rate_scaled", min_val=0, include_min=False)
    d_t = 1.0 / f if params.d_t is None else params.d_t
    q = stats.qvar
    memory = stats.sigma_v2 * (1.0 - stats.rho_v) + params.L / f * q + noise.sigma_w_ref2
    return (2.0 * params.me_gradient_weight() * memory + 2.0 * q * d_t
            + noise.sigma_w_current2 + noise.sigma_w_ref2)


def residual_rho(stats, params, noise, f_rate_scaled, axis="x"):
    """Lag-1 correlation coefficient of the residual along ``axis``.

    Returns ``(rho, degenerate)``. The raw value is clamped to
    ``[0, 1 - 1e-9]``; a clamp or a zero residual variance sets ``degenerate``.
    """
    if axis == "x":
        s_own, s_other = params.sigma_dx2, params.sigma_dy2
    elif axis == "y":
        s_own, s_other = params.sigma_dy2, params.sigma_dx2
    else:
        raise ValidationError(f"axis must be 'x' or 'y', got {axis!r}")
    var = residual_variance(stats, params, noise, f_rate_scaled)
    if var <= 0.0:
        return 0.0, True
    sv2, rho = stats.sigma_v2, stats.rho_v
    f = float(f_rate_scaled)
    rhs = (2.0 * (s_own + s_other) * sv2 * rho
           - s_own * (sv2 * (1.0 + rho * rho) + params.L / f * stats.qvar + noise.sigma_w_ref2)
           - 2.0 * s_other * sv2 * rho * rho)
    value = rhs / var
    if value < 0.0:
        return 0.0, True
    if value > RHO_MAX:
        return RHO_MAX, True
    return value, False


def skip_mse(residual_var, gamma_skip):
    gamma_skip = check_scalar(gamma_skip, "gamma_skip", min_val=1)
    return gamma_skip * residual_var
