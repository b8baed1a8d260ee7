"""Transform coding of the inter residual.

Each 16x16 slice is split into ``beta**2`` square sub-slices that are
transformed separately with a separable cosine basis. Coefficient second
moments have a closed form via the ``Y`` integral; a fixed relative bit
allocation spreads the budget over the retained coefficients and a Gaussian
quantizer model gives the expected slice MSE.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._validation import check_scalar
from .exceptions import NoInterSlicesError, ValidationError


def _default_omega(d):
    return tuple((k, l) for k in range(d) for l in range(d))


@dataclass(frozen=True)
class TransformConfig:
    beta: int = 4
    d_trans: int = 4
    q_weight: tuple = None
    omega: tuple = None
    _q_norm: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        beta = check_scalar(self.beta, "beta", min_val=1, integer=True)
        d = check_scalar(self.d_trans, "d_trans", min_val=1, integer=True)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "d_trans", d)
        qw = np.ones((d, d)) if self.q_weight is None else np.asarray(self.q_weight, dtype=float)
        if qw.shape != (d, d):
            raise ValidationError(f"q_weight must be {d}x{d}, got shape {qw.shape}")
        object.__setattr__(self, "q_weight", tuple(map(tuple, qw.tolist())))
        omega = _default_omega(d) if self.omega is None else tuple(
            (int(k), int(l)) for k, l in self.omega)
        for k, l in omega:
            if not (0 <= k < d and 0 <= l < d):
                raise ValidationError(f"omega index ({k}, {l}) outside a {d}x{d} transform")
        if len(set(omega)) != len(omega):
            raise ValidationError("omega contains duplicate indices")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "_q_norm", normalize_qweight(qw))

    @property
    def prediction_block(self):
        return self.beta * self.d_trans

    @property
    def normalized_weights(self):
        return self._q_norm.copy()

    def to_dict(self):
        return {"beta": self.beta, "d_trans": self.d_trans,
                "q_weight": [list(r) for r in self.q_weight],
                "omega": [list(p) for p in self.omega]}


def normalize_qweight(q_weight):
    """Relative bit share of each coefficient: inverse weights summing to 1."""
    qw = np.asarray(q_weight, dtype=float)
    if qw.ndim != 2 or qw.shape[0] != qw.shape[1]:
        raise ValidationError(f"q_weight must be a square matrix, got shape {qw.shape}")
    if not np.all(qw > 0):
        raise ValidationError("q_weight entries must be positive")
    inv = 1.0 / qw
    return inv / inv.sum()


def integral_Y(A, k, l):
    """Closed form of ``int_0^1 int_0^1 exp(-A|x-xi|) cos(k pi x) cos(l pi xi)``.

    ``A = inf`` (white residual) gives 0.
    """
    if not A > 0:
        raise ValidationError(f"A must be positive, got {A!r}")
    if math.isinf(A):
        return 0.0
    if k == 0 and l == 0 and A < 1e-3:
        # 2/A - 2(1 - e^-A)/A^2 cancels badly here; Taylor series instead
        return 1.0 - A / 3.0 + A * A / 12.0 - A ** 3 / 60.0
    kp2 = (k * math.pi) ** 2
    lp2 = (l * math.pi) ** 2
    diag = 0.0
    if k == l:
        diag = (A / (A * A + lp2) + A / (A * A + kp2)) * 0.5 * (2.0 if k == 0 else 1.0)
    # (1 + (-1)^(k+l)) - e^-A [(-1)^k + (-1)^l]; mixed parity vanishes by
    # the x -> 1-x symmetry. expm1 avoids cancellation near A = 0.
    if k % 2 == 0 and l % 2 == 0:
        edge = -2.0 * math.expm1(-A)
    elif k % 2 == 1 and l % 2 == 1:
        edge = 2.0 + 2.0 * math.exp(-A)
    else:
        return 0.0
    return diag - A * A / ((A * A + lp2) * (A * A + kp2)) * edge


def coeff_second_moment(sigma_fr2, alpha_rx, alpha_ry, cfg, m, n, k, l):
    """``E[F_kl^2]`` of the residual over one sub-slice."""
    bm = cfg.beta * m
    bn = cfg.beta * n
    yx = integral_Y(alpha_rx / bm, k, k)
    yy = integral_Y(alpha_ry / bn, l, l)
    weight = (2.0 - (k == 0)) * (2.0 - (l == 0))
    return sigma_fr2 * weight / (bm * bn) * yx * yy


class BitAllocation(NamedTuple):
    per_slice: float
    per_sub_slice: float
    bits: np.ndarray  # d_trans x d_trans, indexed [k, l]


def bit_allocation(b_total, slicing, p_inter, cfg):
    """Bits per coefficient of an inter sub-slice at total rate ``b_total`` (bits/s)."""
    if p_inter <= 0.0:
        raise NoInterSlicesError("no inter slices at this rate (p_inter = 0)")
    per_slice = b_total / (slicing.m * slicing.n * slicing.t * p_inter)
    per_sub = per_slice / cfg.beta ** 2
    return BitAllocation(per_slice, per_sub, cfg.normalized_weights * per_sub)


def allocate_bits(b_total, slicing, p_inter, cfg, k, l):
    return float(bit_allocation(b_total, slicing, p_inter, cfg).bits[k, l])


def retained_energy(sigma_fr2, alpha_rx, alpha_ry, cfg, slicing, bits=None, k_quant=1.0):
    """``beta^2 M N`` times the sum over Omega of ``E[F^2] (1 - K 2^(-2b))``.

    With ``bits=None`` the quantization factor is 1 (unquantized retention).
    """
    scale = cfg.beta ** 2 * slicing.m * slicing.n
    total = 0.0
    for k, l in cfg.omega:
        e = coeff_second_moment(sigma_fr2, alpha_rx, alpha_ry, cfg, slicing.m, slicing.n, k, l)
        if bits is not None:
            e *= 1.0 - k_quant * 2.0 ** (-2.0 * bits[k][l])
        total += e
    return float(scale * total)


def inter_mse(sigma_fr2, alpha_rx, alpha_ry, cfg, slicing, bits, k_quant,
              upper=math.inf, clamp=True):
    """Expected MSE of an inter-coded slice with quantized coefficients.

    Returns ``(mse, clamped)``. With ``clamp`` the value is limited to
    ``[0, upper]`` and ``clamped`` reports whether that fired.
    """
    k_quant = check_scalar(k_quant, "k_quant", min_val=1, max_val=3)
    b = np.asarray(bits, dtype=float)
    if np.any(b < 0):
        raise ValidationError("bit allocations must be non-negative")
    raw = sigma_fr2 - retained_energy(sigma_fr2, alpha_rx, alpha_ry, cfg, slicing, b, k_quant)
    if not clamp:
        return raw, False
    if raw < 0.0:
        return 0.0, True
    if raw > upper:
        return upper, True
    return raw, False
