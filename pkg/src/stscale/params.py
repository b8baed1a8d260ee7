"""Flat container for every tunable model constant.

The JSON config uses the same flat key names; ``ModelParams`` builds the
per-stage parameter objects from them.
"""

import json
from dataclasses import asdict, dataclass, fields
from typing import Optional

from ._validation import check_scalar
from .exceptions import ValidationError
from .modes import ModeParams
from .residual import COMPRESSION_NOISE_MODES, ResidualParams
from .stats import DEFAULT_ME_VARIANCE
from .transform import TransformConfig


@dataclass(frozen=True)
class FrucParams:
    """ME accuracy of absent frames and the noise of interpolated frames."""

    sigma_dx_abs2: float = 4 * DEFAULT_ME_VARIANCE
    sigma_dy_abs2: float = 4 * DEFAULT_ME_VARIANCE
    sigma_wj2: float = 0.0
    L: float = 100.0

    def __post_init__(self):
        for f in fields(self):
            check_scalar(getattr(self, f.name), f.name, min_val=0)


@dataclass(frozen=True)
class ModelParams:
    # coding modes
    p_inter_asymp_min: float = 85.0
    gamma_c: float = 0.3
    gamma_d: float = 20.0
    # residual
    gamma_skip: float = 2.0
    k_quant: float = 1.5
    L: float = 100.0
    sigma_dx2: float = DEFAULT_ME_VARIANCE
    sigma_dy2: float = DEFAULT_ME_VARIANCE
    compression_noise_mode: str = "gaussian"
    rd_alpha: Optional[float] = None
    rd_beta: Optional[float] = None
    fixed_point: bool = False
    # transform
    beta: int = 4
    d_trans: int = 4
    q_weight: Optional[tuple] = None
    omega: Optional[tuple] = None
    # interpolation
    sigma_dx_abs2: float = 4 * DEFAULT_ME_VARIANCE
    sigma_dy_abs2: float = 4 * DEFAULT_ME_VARIANCE
    sigma_wj2: float = 0.0
    # raster
    block: int = 16
    peak: float = 255.0

    def __post_init__(self):
        if self.compression_noise_mode not in COMPRESSION_NOISE_MODES:
            raise ValidationError(
                f"compression_noise_mode must be one of {COMPRESSION_NOISE_MODES}, "
                f"got {self.compression_noise_mode!r}")
        if self.compression_noise_mode == "empirical" and (
                self.rd_alpha is None or self.rd_beta is None):
            raise ValidationError("empirical compression noise needs rd_alpha and rd_beta")
        if not isinstance(self.fixed_point, bool):
            raise ValidationError(f"fixed_point must be a boolean, got {self.fixed_point!r}")
        check_scalar(self.peak, "peak", min_val=0, include_min=False)
        block = check_scalar(self.block, "block", min_val=1, integer=True)
        object.__setattr__(self, "block", block)
        # normalise nested sequences so instances hash and compare by value
        if self.q_weight is not None:
            object.__setattr__(self, "q_weight", tuple(tuple(float(v) for v in r)
                                                       for r in self.q_weight))
        if self.omega is not None:
            object.__setattr__(self, "omega", tuple((int(k), int(l)) for k, l in self.omega))
        # build every stage once so bad values fail here, not mid-sweep
        self.mode_params()
        cfg = self.transform_config()
        if cfg.prediction_block != block:
            raise ValidationError(
                f"beta * d_trans = {cfg.prediction_block} must equal the block size {block}")
        ResidualParams(eps_x=1.0, eps_y=1.0, **self._residual_kw())
        self.fruc_params()

    def mode_params(self):
        return ModeParams(self.p_inter_asymp_min, self.gamma_c, self.gamma_d)

    def transform_config(self):
        return TransformConfig(beta=self.beta, d_trans=self.d_trans,
                               q_weight=self.q_weight, omega=self.omega)

    def _residual_kw(self):
        return dict(sigma_dx2=self.sigma_dx2, sigma_dy2=self.sigma_dy2, L=self.L,
                    gamma_skip=self.gamma_skip, k_quant=self.k_quant)

    def residual_params(self, stats):
        return ResidualParams.for_stats(stats, **self._residual_kw())

    def fruc_params(self):
        return FrucParams(self.sigma_dx_abs2, self.sigma_dy_abs2, self.sigma_wj2, self.L)

    def to_dict(self):
        d = asdict(self)
        if d["q_weight"] is not None:
            d["q_weight"] = [list(r) for r in d["q_weight"]]
        if d["omega"] is not None:
            d["omega"] = [list(p) for p in d["omega"]]
        return d

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValidationError(f"unknown model parameter(s): {sorted(unknown)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ValidationError(str(exc)) from None

    def updated(self, **kw):
        return self.from_dict({**self.to_dict(), **kw})

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


__all__ = ["FrucParams", "ModelParams"]
