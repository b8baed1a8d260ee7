"""Second-order statistics of a source video.

The model only needs a handful of numbers from the raw frames: the luma
variance, the lag-1 correlation coefficient along each axis (separable
first-order Markov fit), and the motion-complexity parameter ``qvar``
recovered from a measured block-matching residual.
"""

import logging
from dataclasses import asdict, dataclass, fields
from typing import NamedTuple

import numpy as np

from ._validation import check_frames, check_scalar
from .exceptions import ValidationError

logger = logging.getLogger(__name__)

RHO_MAX = 1.0 - 1e-9
DEFAULT_ME_VARIANCE = 1.0 / 48.0  # uniform error over a half-pel interval


@dataclass(frozen=True)
class VideoStats:
    sigma_v2: float
    rho_vx: float
    rho_vy: float
    qvar: float
    width: int
    height: int
    frame_rate: float

    def __post_init__(self):
        check_scalar(self.sigma_v2, "sigma_v2", min_val=0)
        check_scalar(self.qvar, "qvar", min_val=0)
        for name in ("rho_vx", "rho_vy"):
            check_scalar(getattr(self, name), name, min_val=0, max_val=1, include_max=False)
        check_scalar(self.width, "width", min_val=1, integer=True)
        check_scalar(self.height, "height", min_val=1, integer=True)
        check_scalar(self.frame_rate, "frame_rate", min_val=0, include_min=False)

    @property
    def rho_v(self):
        """Scalar correlation coefficient: the mean of the two axes."""
        return 0.5 * (self.rho_vx + self.rho_vy)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        names = {f.name for f in fields(cls)}
        missing = names - set(d)
        if missing:
            raise ValidationError(f"stats document is missing keys: {sorted(missing)}")
        kw = {k: d[k] for k in names}
        kw["width"] = int(kw["width"])
        kw["height"] = int(kw["height"])
        return cls(**kw)


class SpatialStats(NamedTuple):
    sigma_v2: float
    rho_vx: float
    rho_vy: float
    degenerate: bool


def estimate_spatial_stats(frames):
    """Variance and lag-1 correlation coefficients averaged over frames.

    Each frame has its own mean removed. A correlation estimate that falls
    outside ``[0, 1 - 1e-9]`` is clamped and reported via ``degenerate``; a
    constant video gives zero variance, zero correlation and ``degenerate``.
    """
    frames = getattr(frames, "frames", frames)
    x = check_frames(frames).astype(np.float64)
    x = x - x.mean(axis=(1, 2), keepdims=True)

    var = np.mean(x * x, axis=(1, 2))
    sigma_v2 = float(var.mean())
    live = var > 0
    if not live.any():
        return SpatialStats(0.0, 0.0, 0.0, True)

    degenerate = False
    rhos = []
    for axis in (2, 1):
        n = x.shape[axis]
        if n < 2:
            rhos.append(0.0)
            degenerate = True
            continue
        a = np.take(x, range(n - 1), axis=axis)
        b = np.take(x, range(1, n), axis=axis)
        cov = np.mean(a * b, axis=(1, 2))
        rho = float(np.mean(cov[live] / var[live]))
        if rho < 0.0 or rho > RHO_MAX:
            degenerate = True
            rho = min(max(rho, 0.0), RHO_MAX)
        rhos.append(rho)
    return SpatialStats(sigma_v2, rhos[0], rhos[1], degenerate)


def _displacement_order(search_range):
    r = range(-search_range, search_range + 1)
    cands = [(dy, dx) for dy in r for dx in r]
    # ties: smallest magnitude, then raster order
    cands.sort(key=lambda d: (d[0] * d[0] + d[1] * d[1], d[0], d[1]))
    return cands


def block_match(current, reference, block=16, search_range=16):
    """Integer-pel full-search block matching with an SSD criterion.

    ``current`` is partitioned into ``block x block`` tiles; each tile is
    matched against ``reference`` within ``+-search_range``. Candidate
    positions that leave the frame are skipped, never padded.

    Returns ``(vectors, ssd)``: ``vectors[by, bx] = (dy, dx)`` and the
    matching SSD per block.
    """
    cur = np.asarray(current, dtype=np.float64)
    ref = np.asarray(reference, dtype=np.float64)
    if cur.shape != ref.shape or cur.ndim != 2:
        raise ValidationError(f"frame shapes differ or are not 2-D: {cur.shape} vs {ref.shape}")
    block = check_scalar(block, "block", min_val=1, integer=True)
    search_range = check_scalar(search_range, "search_range", min_val=0, integer=True)
    h, w = cur.shape
    if h % block or w % block:
        raise ValidationError(f"block {block} does not divide frame size {w}x{h}")
    nby, nbx = h // block, w // block

    r = search_range
    padded = np.zeros((h + 2 * r, w + 2 * r))
    padded[r:r + h, r:r + w] = ref
    top = np.arange(nby) * block
    left = np.arange(nbx) * block

    best = np.full((nby, nbx), np.inf)
    vectors = np.zeros((nby, nbx, 2), dtype=np.int64)
    for dy, dx in _displacement_order(r):
        ok_y = (top + dy >= 0) & (top + dy + block <= h)
        ok_x = (left + dx >= 0) & (left + dx + block <= w)
        if not ok_y.any() or not ok_x.any():
            continue
        shifted = padded[r + dy:r + dy + h, r + dx:r + dx + w]
        d = cur - shifted
        ssd = (d * d).reshape(nby, block, nbx, block).sum(axis=(1, 3))
        ssd[~ok_y, :] = np.inf
        ssd[:, ~ok_x] = np.inf
        better = ssd < best
        best[better] = ssd[better]
        vectors[better] = (dy, dx)
    return vectors, best


def estimate_prediction_error(frames, block=16, search_range=16, pairs=None):
    """Mean squared block-matching residual between consecutive frames.

    Averaged over the first ``pairs`` consecutive pairs (default
    ``min(10, n_frames - 1)``), frame ``t + 1`` predicted from frame ``t``.
    """
    frames = getattr(frames, "frames", frames)
    x = check_frames(frames, min_frames=2)
    n_pairs = x.shape[0] - 1
    if pairs is None:
        pairs = min(10, n_pairs)
    pairs = check_scalar(pairs, "pairs", min_val=1, max_val=n_pairs, integer=True)
    per_pair = []
    for t in range(pairs):
        _, ssd = block_match(x[t + 1], x[t], block, search_range)
        per_pair.append(ssd.sum() / ssd.size / (block * block))
    # fixed summation order keeps the result schedule independent
    return float(np.sum(per_pair) / pairs)


def estimate_qvar(sigma_hat_12, *, sigma_v2, rho_v, frame_rate,
                  sigma_dx2=DEFAULT_ME_VARIANCE, sigma_dy2=DEFAULT_ME_VARIANCE, L=100.0):
    """Motion-complexity parameter from a measured two-frame MC residual.

    Returns ``(qvar, clamped)``; a negative estimate is clamped to 0.
    """
    frame_rate = check_scalar(frame_rate, "frame_rate", min_val=0, include_min=False)
    me = sigma_dx2 + sigma_dy2
    denom = 2.0 * (me * L + 1.0) / frame_rate
    if denom <= 0:
        raise ValidationError("qvar denominator must be positive")
    qvar = (sigma_hat_12 - 2.0 * me * sigma_v2 * (1.0 - rho_v)) / denom
    if qvar < 0:
        logger.warning("qvar estimate %.6g is negative; clamped to 0", qvar)
        return 0.0, True
    return float(qvar), False


def estimate_video_stats(video, *, block=16, search_range=16, pairs=None,
                         sigma_dx2=DEFAULT_ME_VARIANCE, sigma_dy2=DEFAULT_ME_VARIANCE,
                         L=100.0):
    """Run all estimators on a :class:`~stscale.video.RawVideo`.

    Returns ``(VideoStats, diagnostics)``.
    """
    sp = estimate_spatial_stats(video.frames)
    sigma_hat = estimate_prediction_error(video.frames, block, search_range, pairs)
    rho_v = 0.5 * (sp.rho_vx + sp.rho_vy)
    qvar, q_clamped = estimate_qvar(
        sigma_hat, sigma_v2=sp.sigma_v2, rho_v=rho_v, frame_rate=video.frame_rate,
        sigma_dx2=sigma_dx2, sigma_dy2=sigma_dy2, L=L,
    )
    stats = VideoStats(
        sigma_v2=sp.sigma_v2, rho_vx=sp.rho_vx, rho_vy=sp.rho_vy, qvar=qvar,
        width=video.width, height=video.height, frame_rate=video.frame_rate,
    )
    diag = {
        "sigma_hat_12": sigma_hat,
        "spatial_degenerate": sp.degenerate,
        "qvar_clamped": q_clamped,
    }
    return stats, diag
