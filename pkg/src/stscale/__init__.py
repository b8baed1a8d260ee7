"""Rate-distortion model for spatio-temporally down-scaled low bit-rate video coding."""

from .estimators import DownscalingSelector, VideoStatsEstimator
from .exceptions import (FileSizeMismatchError, NoInterSlicesError, NumericalError,
                         StscaleError, ValidationError, VideoIOError)
from .params import FrucParams, ModelParams
from .stats import VideoStats, estimate_video_stats
from .system import RDPrediction, candidate_grid, optimize, predict, sweep
from .units import BitBudget, ScalingChoice, SlicingParams
from .video import RawVideo, load_raw_video, write_raw_video

__version__ = "0.1.0"

__all__ = [
    "BitBudget", "DownscalingSelector", "FileSizeMismatchError", "FrucParams", "ModelParams",
    "NoInterSlicesError", "NumericalError", "RDPrediction", "RawVideo", "ScalingChoice",
    "SlicingParams", "StscaleError", "ValidationError", "VideoIOError", "VideoStats",
    "VideoStatsEstimator", "candidate_grid", "estimate_video_stats", "load_raw_video",
    "optimize", "predict", "sweep", "write_raw_video",
]
