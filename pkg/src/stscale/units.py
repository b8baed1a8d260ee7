"""Slicing parameters, down-scaling factors and bit-rate unit conversions.

The video is modelled as one second on the unit cube, so the temporal
slice count ``t`` doubles as the (scaled) frame rate.
"""

import math
import re
from dataclasses import dataclass

from ._validation import check_scalar
from .exceptions import ValidationError

DEFAULT_BLOCK = 16


@dataclass(frozen=True)
class ScalingChoice:
    d_m: float = 1.0
    d_n: float = 1.0
    d_t: int = 1

    def __post_init__(self):
        check_scalar(self.d_m, "d_m", min_val=1)
        check_scalar(self.d_n, "d_n", min_val=1)
        d_t = check_scalar(self.d_t, "d_t", min_val=1, integer=True)
        object.__setattr__(self, "d_t", d_t)

    def to_dict(self):
        return {"d_m": self.d_m, "d_n": self.d_n, "d_t": self.d_t}

    @classmethod
    def from_dict(cls, d):
        return cls(d_m=d.get("d_m", 1.0), d_n=d.get("d_n", d.get("d_m", 1.0)),
                   d_t=d.get("d_t", 1))


@dataclass(frozen=True)
class SlicingParams:
    m: int
    n: int
    t: float
    # factors actually realised after rounding m, n to whole macroblocks
    d_m_eff: float = 1.0
    d_n_eff: float = 1.0

    def __post_init__(self):
        check_scalar(self.m, "m", min_val=1, integer=True)
        check_scalar(self.n, "n", min_val=1, integer=True)
        check_scalar(self.t, "t", min_val=1)

    @property
    def slices_per_second(self):
        return self.m * self.n * self.t


@dataclass(frozen=True)
class BitBudget:
    bits_per_second: float

    def __post_init__(self):
        check_scalar(self.bits_per_second, "bits_per_second", min_val=0, include_min=False)


def _round_half_up(x):
    return int(math.floor(x + 0.5))


def slicing_from_scaling(stats, choice, block=DEFAULT_BLOCK):
    """Slice counts ``(m, n, t)`` of the down-scaled video.

    ``stats`` only needs ``width``, ``height`` and ``frame_rate``.

    ``m`` and ``n`` are rounded half-up to whole macroblocks; the factors
    implied by the rounded counts are kept as ``d_m_eff``/``d_n_eff``.
    ``t = frame_rate / d_t`` may be fractional (e.g. 50 fps / 3).
    """
    block = check_scalar(block, "block", min_val=1, integer=True)
    width = check_scalar(stats.width, "width", min_val=1)
    height = check_scalar(stats.height, "height", min_val=1)
    frame_rate = check_scalar(stats.frame_rate, "frame_rate", min_val=0, include_min=False)
    m0 = width / block
    n0 = height / block
    m = _round_half_up(m0 / choice.d_m)
    n = _round_half_up(n0 / choice.d_n)
    if m < 1 or n < 1:
        raise ValidationError(
            f"down-scaling ({choice.d_m}, {choice.d_n}) leaves no whole macroblock "
            f"of a {width:g}x{height:g} frame (m={m}, n={n})"
        )
    t = frame_rate / choice.d_t
    if t < 1:
        raise ValidationError(f"scaled frame rate {t:g} is below one frame per second")
    return SlicingParams(m=m, n=n, t=t, d_m_eff=m0 / m, d_n_eff=n0 / n)


def bits_per_slice(budget, slicing):
    bps = budget.bits_per_second if isinstance(budget, BitBudget) else float(budget)
    return bps / (slicing.m * slicing.n * slicing.t)


def bits_per_pixel(b_slice, block=DEFAULT_BLOCK):
    block = check_scalar(block, "block", min_val=0, include_min=False)
    return b_slice / (block * block)


_SUFFIX = {"": 1.0, "k": 1e3, "m": 1e6, "g": 1e9}
_RATE_RE = re.compile(r"^\s*([0-9]*\.?[0-9]+(?:e[+-]?\d+)?)\s*([kmg]?)(?:bps)?\s*$", re.I)


def parse_bitrate(text):
    """Parse ``'180k'``, ``'1.25M'``, ``'1e6'`` into bits per second."""
    if isinstance(text, (int, float)):
        return check_scalar(text, "bitrate", min_val=0, include_min=False)
    m = _RATE_RE.match(str(text))
    if not m:
        raise ValidationError(f"cannot parse bit-rate {text!r}")
    value = float(m.group(1)) * _SUFFIX[m.group(2).lower()]
    return check_scalar(value, "bitrate", min_val=0, include_min=False)
