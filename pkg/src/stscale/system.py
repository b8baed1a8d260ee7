"""End-to-end distortion of a down-scaled, compressed and up-converted video.

``predict`` evaluates one (scaling choice, bit-rate) point; ``optimize``
searches a finite candidate grid for the lowest overall MSE and ``sweep``
tabulates rate-distortion curves over a range of bit-rates.
"""

import logging
import math
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from typing import List

import numpy as np
from joblib import Parallel, delayed

from ._validation import check_scalar
from .exceptions import NumericalError, StscaleError, ValidationError
from .modes import mode_coefficients, p_inter as _p_inter
from .params import FrucParams, ModelParams
from .residual import (NoiseState, compression_noise, residual_rho, residual_variance,
                       skip_mse)
from .spatial import FramePsdParams, alpha_from_rho, spatial_scaling_mse
from .transform import bit_allocation, inter_mse
from .units import BitBudget, ScalingChoice, bits_per_pixel, bits_per_slice, slicing_from_scaling

logger = logging.getLogger(__name__)

FIXED_POINT_TOL = 1e-6  # relative to sigma_v2
FIXED_POINT_MAX_ITER = 50


@contextmanager
def _stage(name):
    """Tag errors raised inside the block with the pipeline stage."""
    try:
        yield
    except StscaleError as exc:
        if exc.stage is None:
            exc.stage = name
        raise
    except (ZeroDivisionError, OverflowError, FloatingPointError) as exc:
        raise NumericalError(str(exc), stage=name) from exc


def fruc_mse(stats, fp, d_t, j, mse_compression, f_rate_original):
    """MSE of the ``j``-th interpolated frame between two coded frames.

    The coded neighbours carry ``mse_compression`` as their local noise.
    """
    d_t = check_scalar(d_t, "d_t", min_val=2, integer=True)
    j = check_scalar(j, "j", min_val=1, max_val=d_t - 1, integer=True)
    f = check_scalar(f_rate_original, "f_rate_original", min_val=0, include_min=False)
    q = stats.qvar
    interp = 0.5 * (q * d_t / f + mse_compression + fp.sigma_wj2)
    me = (fp.sigma_dx_abs2 + fp.sigma_dy_abs2) * (
        (1.0 - stats.rho_v) * stats.sigma_v2 + fp.L / f * q + mse_compression)
    return interp + me


def overall_mse(mse_spatial, fruc_values, d_t):
    """Frame-weighted mean of coded and interpolated frame MSEs."""
    if d_t == 1:
        return mse_spatial
    return mse_spatial / d_t + (d_t - 1) / d_t * float(np.mean(fruc_values))


def psnr(mse, peak=255.0):
    if mse <= 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


@dataclass
class RDPrediction:
    choice: ScalingChoice
    bitrate: float
    m: int
    n: int
    t: float
    d_m_eff: float
    d_n_eff: float
    b_slice: float
    bits_per_pixel: float
    p_inter: float
    p_skip: float
    mse_spatial_scaling: float
    mse_compression_noise: float
    sigma_fr2: float
    rho_rx: float
    rho_ry: float
    mse_inter: float
    mse_skip: float
    mse_compression: float
    mse_spatial: float
    mse_fruc_per_frame: List[float]
    mse_overall: float
    psnr: float
    fixed_point_iterations: int = 0
    clamp_flags: List[str] = field(default_factory=list)

    @property
    def mse_fruc_mean(self):
        if not self.mse_fruc_per_frame:
            return 0.0
        return float(np.mean(self.mse_fruc_per_frame))

    def to_dict(self):
        d = asdict(self)
        d["choice"] = self.choice.to_dict()
        d["mse_fruc_mean"] = self.mse_fruc_mean
        return d


def _coded_mse(stats, params, cfg, rp, slicing, b_total, p_i, sp_noise, comp_noise):
    """Inter, skip and mode-weighted MSE for a given reference-frame noise."""
    noise = NoiseState.from_components(sp_noise, comp_noise)
    flags = []
    with _stage("residual"):
        var = residual_variance(stats, rp, noise, slicing.t)
        rho_x, deg_x = residual_rho(stats, rp, noise, slicing.t, "x")
        rho_y, deg_y = residual_rho(stats, rp, noise, slicing.t, "y")
        if deg_x:
            flags.append("rho_rx_clamped")
        if deg_y:
            flags.append("rho_ry_clamped")
        # residual lives on the coded raster
        a_x = alpha_from_rho(rho_x, params.block * slicing.m)
        a_y = alpha_from_rho(rho_y, params.block * slicing.n)
        mse_skip = skip_mse(var, rp.gamma_skip)
    with _stage("bit_allocation"):
        alloc = bit_allocation(b_total, slicing, p_i, cfg)
    with _stage("transform"):
        mse_in, clamped = inter_mse(var, a_x, a_y, cfg, slicing, alloc.bits, rp.k_quant,
                                    upper=rp.gamma_skip * var)
        if clamped:
            flags.append("inter_mse_clamped")
    mse_c = p_i * mse_in + (1.0 - p_i) * mse_skip
    return dict(sigma_fr2=var, rho_rx=rho_x, rho_ry=rho_y, mse_inter=mse_in,
                mse_skip=mse_skip, mse_compression=mse_c, flags=flags)


def predict(stats, choice, budget, params=None):
    """Full model evaluation for one scaling choice at one bit-rate."""
    params = params or ModelParams()
    if not isinstance(budget, BitBudget):
        budget = BitBudget(budget)
    b_total = budget.bits_per_second
    cfg = params.transform_config()

    with _stage("slicing"):
        slicing = slicing_from_scaling(stats, choice, params.block)
        b_slice = bits_per_slice(budget, slicing)
        bpp = bits_per_pixel(b_slice, params.block)

    with _stage("spatial_scaling"):
        psd = FramePsdParams.from_stats(stats)
        sp_noise = spatial_scaling_mse(psd, slicing.d_m_eff, slicing.d_n_eff)

    with _stage("compression_noise"):
        comp_noise = compression_noise(params.compression_noise_mode, bpp, stats.sigma_v2,
                                       params.rd_alpha, params.rd_beta)

    with _stage("modes"):
        c_m, d_m = mode_coefficients(params.mode_params(), stats.qvar, slicing.t)
        p_i = _p_inter(b_slice, c_m, d_m)

    rp = params.residual_params(stats)
    coded = _coded_mse(stats, params, cfg, rp, slicing, b_total, p_i, sp_noise, comp_noise)
    iterations = 0
    if params.fixed_point:
        with _stage("noise_closure"):
            tol = FIXED_POINT_TOL * max(stats.sigma_v2, 1e-300)
            for iterations in range(1, FIXED_POINT_MAX_ITER + 1):
                prev = coded["mse_compression"]
                comp_noise = prev
                coded = _coded_mse(stats, params, cfg, rp, slicing, b_total, p_i,
                                   sp_noise, comp_noise)
                step = abs(coded["mse_compression"] - prev)
                if not math.isfinite(coded["mse_compression"]):
                    raise NumericalError("compression-noise closure diverged")
                if step < tol:
                    break
            else:
                raise NumericalError(
                    f"compression-noise closure did not converge in {FIXED_POINT_MAX_ITER} "
                    f"iterations (last step {step:.3g})")

    with _stage("fruc"):
        mse_spatial = coded["mse_compression"]
        fp = params.fruc_params()
        fruc = [fruc_mse(stats, fp, choice.d_t, j, mse_spatial, stats.frame_rate)
                for j in range(1, choice.d_t)]

    with _stage("overall"):
        mse_all = overall_mse(mse_spatial, fruc, choice.d_t)
        if not math.isfinite(mse_all):
            raise NumericalError(f"overall MSE is not finite ({mse_all!r})")

    flags = list(coded["flags"])
    if p_i in (0.0, 1.0):
        flags.append("p_inter_saturated")
    return RDPrediction(
        choice=choice, bitrate=b_total, m=slicing.m, n=slicing.n, t=slicing.t,
        d_m_eff=slicing.d_m_eff, d_n_eff=slicing.d_n_eff,
        b_slice=b_slice, bits_per_pixel=bpp, p_inter=p_i, p_skip=1.0 - p_i,
        mse_spatial_scaling=sp_noise, mse_compression_noise=comp_noise,
        sigma_fr2=coded["sigma_fr2"], rho_rx=coded["rho_rx"], rho_ry=coded["rho_ry"],
        mse_inter=coded["mse_inter"], mse_skip=coded["mse_skip"],
        mse_compression=coded["mse_compression"], mse_spatial=mse_spatial,
        mse_fruc_per_frame=fruc, mse_overall=mse_all, psnr=psnr(mse_all, params.peak),
        fixed_point_iterations=iterations, clamp_flags=sorted(flags),
    )


def candidate_grid(spatial=(1, 2, 3), temporal=(1, 2, 3), square=True):
    """Scaling choices over the given factors, ordered by ``(d_t, d_m, d_n)``.

    With ``square`` the two spatial factors are tied (``d_m == d_n``).
    """
    spatial = sorted({float(s) for s in spatial})
    temporal = sorted({int(t) for t in temporal})
    if not spatial or not temporal:
        raise ValidationError("candidate sets must be nonempty")
    out = []
    for dt in temporal:
        for dm in spatial:
            if square:
                out.append(ScalingChoice(dm, dm, dt))
            else:
                out.extend(ScalingChoice(dm, dn, dt) for dn in spatial)
    return out


def _sort_key(choice):
    return (choice.d_t, choice.d_m, choice.d_n)


@dataclass
class OptimizeResult:
    best: RDPrediction
    grid: list  # RDPrediction objects, in candidate order
    failures: list  # (ScalingChoice, message)

    def to_dict(self):
        return {
            "best": self.best.to_dict(),
            "grid": [p.to_dict() for p in self.grid],
            "failures": [{"choice": c.to_dict(), "error": msg} for c, msg in self.failures],
        }


def optimize(stats, budget, candidates=None, params=None):
    """Exhaustive search of ``candidates`` for the lowest ``mse_overall``.

    Ties go to the smaller ``d_t``, then the smaller ``d_m`` and ``d_n``.
    """
    candidates = candidate_grid() if candidates is None else list(candidates)
    if not candidates:
        raise ValidationError("candidate set is empty")
    grid, failures = [], []
    for choice in sorted(candidates, key=_sort_key):
        try:
            grid.append(predict(stats, choice, budget, params))
        except StscaleError as exc:
            failures.append((choice, str(exc)))
    if not grid:
        detail = "; ".join(f"{c.to_dict()}: {msg}" for c, msg in failures)
        raise NumericalError(f"every candidate failed: {detail}", stage="optimize")
    best = min(grid, key=lambda p: (p.mse_overall,) + _sort_key(p.choice))
    return OptimizeResult(best, grid, failures)


SWEEP_COLUMNS = ("bitrate_bps", "d_m", "d_n", "d_t", "b_slice", "p_inter", "mse_spatial",
                 "mse_compression", "mse_fruc_mean", "mse_overall", "psnr_db", "flags")


def _sweep_point(stats, choice, rate, params):
    row = {"bitrate_bps": rate, "d_m": choice.d_m, "d_n": choice.d_n, "d_t": choice.d_t}
    try:
        p = predict(stats, choice, rate, params)
    except StscaleError as exc:
        nan = math.nan
        row.update(b_slice=nan, p_inter=nan, mse_spatial=nan, mse_compression=nan,
                   mse_fruc_mean=nan, mse_overall=nan, psnr_db=nan,
                   flags=f"error:{exc}")
        return row
    row.update(b_slice=p.b_slice, p_inter=p.p_inter, mse_spatial=p.mse_spatial,
               mse_compression=p.mse_compression, mse_fruc_mean=p.mse_fruc_mean,
               mse_overall=p.mse_overall, psnr_db=p.psnr, flags="|".join(p.clamp_flags))
    return row


def sweep(stats, bitrates, candidates=None, params=None, n_jobs=1):
    """Rows for every (bit-rate, candidate), sorted by ``(bitrate, d_t, d_m, d_n)``.

    Failing points are kept with NaN values and an ``error:`` flag. Results
    do not depend on ``n_jobs``.
    """
    rates = [check_scalar(b, "bitrate", min_val=0, include_min=False) for b in bitrates]
    if not rates:
        raise ValidationError("bit-rate range is empty")
    candidates = candidate_grid() if candidates is None else list(candidates)
    if not candidates:
        raise ValidationError("candidate set is empty")
    params = params or ModelParams()
    points = [(r, c) for r in sorted(rates) for c in sorted(candidates, key=_sort_key)]
    if n_jobs == 1:
        return [_sweep_point(stats, c, r, params) for r, c in points]
    # joblib returns results in submission order
    return Parallel(n_jobs=n_jobs)(delayed(_sweep_point)(stats, c, r, params) for r, c in points)


def optimal_choices(rows):
    """Best candidate per bit-rate from sweep rows (same tie-break as ``optimize``)."""
    best = {}
    for row in rows:
        if not math.isfinite(row["mse_overall"]):
            continue
        key = (row["mse_overall"], row["d_t"], row["d_m"], row["d_n"])
        cur = best.get(row["bitrate_bps"])
        if cur is None or key < cur[0]:
            best[row["bitrate_bps"]] = (key, row)
    return {r: v[1] for r, v in sorted(best.items())}


__all__ = ["FrucParams", "OptimizeResult", "RDPrediction", "SWEEP_COLUMNS", "candidate_grid",
           "fruc_mse", "optimal_choices", "optimize", "overall_mse", "predict", "psnr", "sweep"]
