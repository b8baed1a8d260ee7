"""Inter / skip coding-mode probabilities at low bit-rates.

Intra blocks in P-frames are neglected, so ``p_inter + p_skip = 1``. The
inter share follows a linear-fractional curve in bits-per-slice whose
asymptote and knee depend on the frame rate and the motion complexity.
"""

from dataclasses import dataclass

from ._validation import check_scalar


@dataclass(frozen=True)
class ModeParams:
    p_inter_asymp_min: float = 85.0  # percent
    gamma_c: float = 0.3
    gamma_d: float = 20.0

    def __post_init__(self):
        check_scalar(self.p_inter_asymp_min, "p_inter_asymp_min", min_val=0,
                     include_min=False, max_val=100)
        check_scalar(self.gamma_c, "gamma_c", min_val=0)
        check_scalar(self.gamma_d, "gamma_d", min_val=0)


def mode_coefficients(params, qvar, f_rate):
    """Return ``(c_m, d_m)`` for a frame rate and motion complexity."""
    f_rate = check_scalar(f_rate, "f_rate", min_val=0, include_min=False)
    motion = qvar / f_rate
    c_m = 100.0 / (params.p_inter_asymp_min + params.gamma_c * motion)
    d_m = params.gamma_d + motion
    return c_m, d_m


def p_inter(b_slice, c_m, d_m):
    """Probability that a slice is inter coded, clamped to ``[0, 1]``."""
    b_slice = check_scalar(b_slice, "b_slice", min_val=0)
    den = c_m * b_slice + d_m
    if den <= 0:
        if b_slice == 0:
            return 0.0
        check_scalar(den, "c_m * b_slice + d_m", min_val=0, include_min=False)
    return min(max(b_slice / den, 0.0), 1.0)


def p_skip(b_slice, c_m, d_m):
    return 1.0 - p_inter(b_slice, c_m, d_m)
