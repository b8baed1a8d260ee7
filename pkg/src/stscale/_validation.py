"""Small argument-checking helpers shared by the model modules."""

import math
import numbers

import numpy as np

from .exceptions import ValidationError


def check_scalar(x, name, *, min_val=None, max_val=None, include_min=True,
                 include_max=True, integer=False):
    """Validate a real scalar and return it as ``float`` (or ``int``)."""
    if isinstance(x, bool) or not isinstance(x, (numbers.Real, np.number)):
        raise ValidationError(f"{name} must be a real number, got {type(x).__name__}")
    x = float(x)
    if math.isnan(x):
        raise ValidationError(f"{name} is NaN")
    if integer:
        if not float(x).is_integer():
            raise ValidationError(f"{name} must be an integer, got {x!r}")
        x = int(x)
    if min_val is not None:
        if (x < min_val) if include_min else (x <= min_val):
            op = ">=" if include_min else ">"
            raise ValidationError(f"{name} must be {op} {min_val}, got {x!r}")
    if max_val is not None:
        if (x > max_val) if include_max else (x >= max_val):
            op = "<=" if include_max else "<"
            raise ValidationError(f"{name} must be {op} {max_val}, got {x!r}")
    return x


def check_frames(frames, *, min_frames=1):
    """Coerce a frame stack to a 3-D array ``(n_frames, height, width)``."""
    arr = np.asarray(frames)
    if arr.ndim == 2:
        arr = arr[np.newaxis]
    if arr.ndim != 3:
        raise ValidationError(f"frames must be 2-D or 3-D, got shape {arr.shape}")
    if arr.shape[0] < min_frames:
        raise ValidationError(f"need at least {min_frames} frame(s), got {arr.shape[0]}")
    if arr.shape[1] == 0 or arr.shape[2] == 0:
        raise ValidationError(f"empty frame dimensions {arr.shape[1:]}")
    if not np.issubdtype(arr.dtype, np.number):
        raise ValidationError(f"frames must be numeric, got dtype {arr.dtype}")
    return arr


def clamp(x, lo, hi):
    """Return ``(clamped_value, fired)``."""
    if x < lo:
        return lo, True
    if x > hi:
        return hi, True
    return x, False
