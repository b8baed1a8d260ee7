"""Raw planar 8-bit luma video files.

A file is a plain concatenation of frames, each ``width * height`` bytes in
row-major order with the origin at the top-left sample. There is no header.
"""

import os
from dataclasses import dataclass

import numpy as np

from ._validation import check_frames, check_scalar
from .exceptions import FileSizeMismatchError, ValidationError, VideoIOError


@dataclass(frozen=True, eq=False)
class RawVideo:
    """Grayscale video held in memory as a ``(n_frames, height, width)`` array."""

    width: int
    height: int
    frame_rate: float
    frames: np.ndarray

    def __post_init__(self):
        check_scalar(self.width, "width", min_val=1, integer=True)
        check_scalar(self.height, "height", min_val=1, integer=True)
        check_scalar(self.frame_rate, "frame_rate", min_val=0, include_min=False)
        frames = check_frames(self.frames, min_frames=2)
        if frames.shape[1:] != (self.height, self.width):
            raise ValidationError(
                f"frame shape {frames.shape[1:]} does not match "
                f"height x width = ({self.height}, {self.width})"
            )
        frames.setflags(write=False)
        object.__setattr__(self, "frames", frames)

    @property
    def n_frames(self):
        return self.frames.shape[0]

    def __len__(self):
        return self.n_frames


def _check_dims(width, height, frame_rate):
    for name, v in (("width", width), ("height", height)):
        check_scalar(v, name, min_val=1, integer=True)
    check_scalar(frame_rate, "frame_rate", min_val=0, include_min=False)


def load_raw_video(path, width, height, frame_rate):
    """Read a headerless 8-bit luma file.

    Sample ``(x, y)`` of frame ``t`` is byte ``t*W*H + y*W + x``.
    """
    _check_dims(width, height, frame_rate)
    frame_bytes = int(width) * int(height)
    try:
        size = os.path.getsize(path)
        if size % frame_bytes:
            raise FileSizeMismatchError(path, frame_bytes, size)
        data = np.fromfile(path, dtype=np.uint8)
    except FileNotFoundError as exc:
        raise VideoIOError(f"{path}: no such file") from exc
    except OSError as exc:
        if isinstance(exc, VideoIOError):
            raise
        raise VideoIOError(f"{path}: {exc}") from exc
    n = size // frame_bytes
    if n < 2:
        raise ValidationError(f"{path}: need at least 2 frames, file holds {n}")
    frames = data.reshape(n, int(height), int(width))
    return RawVideo(int(width), int(height), float(frame_rate), frames)


def write_raw_video(path, video):
    """Write ``video`` in the same layout :func:`load_raw_video` reads."""
    frames = np.asarray(video.frames)
    if frames.dtype != np.uint8:
        if frames.min() < 0 or frames.max() > 255:
            raise ValidationError("samples must lie in [0, 255] to be written as 8-bit")
        frames = np.rint(frames).astype(np.uint8)
    try:
        np.ascontiguousarray(frames).tofile(path)
    except OSError as exc:
        raise VideoIOError(f"{path}: {exc}") from exc
