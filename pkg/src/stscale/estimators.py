"""scikit-learn style wrappers around stats estimation and factor selection."""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .params import ModelParams
from .stats import DEFAULT_ME_VARIANCE, VideoStats, estimate_video_stats
from .system import candidate_grid, optimize
from .video import RawVideo


class VideoStatsEstimator(BaseEstimator):
    """Fit second-order video statistics from raw luma frames.

    Parameters
    ----------
    frame_rate : float
        Source frame rate in frames per second.
    block, search_range : int
        Block-matching tile size and search window (pels).
    pairs : int or None
        Consecutive frame pairs averaged; ``None`` means ``min(10, n - 1)``.

    Attributes
    ----------
    stats_ : VideoStats
    diagnostics_ : dict
    """

    def __init__(self, frame_rate=50.0, block=16, search_range=16, pairs=None,
                 sigma_dx2=DEFAULT_ME_VARIANCE, sigma_dy2=DEFAULT_ME_VARIANCE, L=100.0):
        self.frame_rate = frame_rate
        self.block = block
        self.search_range = search_range
        self.pairs = pairs
        self.sigma_dx2 = sigma_dx2
        self.sigma_dy2 = sigma_dy2
        self.L = L

    def fit(self, X, y=None):
        """``X`` is a ``RawVideo`` or an ``(n_frames, height, width)`` array."""
        if not isinstance(X, RawVideo):
            frames = np.asarray(X)
            if frames.ndim != 3:
                raise ValueError(f"expected a 3-D frame stack, got shape {frames.shape}")
            X = RawVideo(frames.shape[2], frames.shape[1], self.frame_rate, frames)
        self.stats_, self.diagnostics_ = estimate_video_stats(
            X, block=self.block, search_range=self.search_range, pairs=self.pairs,
            sigma_dx2=self.sigma_dx2, sigma_dy2=self.sigma_dy2, L=self.L)
        return self


class DownscalingSelector(BaseEstimator):
    """Pick the down-scaling factors that minimize predicted distortion.

    ``fit`` takes a ``VideoStats`` (or its dict form); ``predict`` maps
    bit-rates (bits/s) to rows ``(d_m, d_n, d_t)``.
    """

    def __init__(self, spatial=(1, 2, 3), temporal=(1, 2, 3), square=True, params=None):
        self.spatial = spatial
        self.temporal = temporal
        self.square = square
        self.params = params

    def fit(self, X, y=None):
        self.stats_ = X if isinstance(X, VideoStats) else VideoStats.from_dict(X)
        self.candidates_ = candidate_grid(self.spatial, self.temporal, self.square)
        self.params_ = self.params if self.params is not None else ModelParams()
        return self

    def _rates(self, bitrates):
        return check_array(np.atleast_1d(np.asarray(bitrates, dtype=float)),
                           ensure_2d=False).ravel()

    def optimize(self, bitrates):
        """One ``OptimizeResult`` per bit-rate."""
        check_is_fitted(self, "stats_")
        return [optimize(self.stats_, float(b), self.candidates_, self.params_)
                for b in self._rates(bitrates)]

    def predict(self, bitrates):
        best = [r.best.choice for r in self.optimize(bitrates)]
        return np.array([[c.d_m, c.d_n, c.d_t] for c in best], dtype=float)

    def predict_psnr(self, bitrates):
        return np.array([r.best.psnr for r in self.optimize(bitrates)])
