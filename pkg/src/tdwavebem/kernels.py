"""Pointwise space-time kernels of the retarded layer potentials.

U is the single-layer kernel (c(t-s) - |x-y|)_+^d / |x-y|; W = grad_y U.
The scaled time derivatives U^(p) implement the finite binomial (Taylor)
expansion of U used by the distant-future translation.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .tbasis import trunc_pow

__all__ = [
    "KernelParams",
    "kernel_u",
    "kernel_w",
    "kernel_u_deriv",
    "taylor_shift",
]


@dataclass(frozen=True)
class KernelParams:
    c: float
    d: int
    dt: float

    def __post_init__(self):
        if self.c <= 0.0:
            raise ValueError(f"wave speed must be positive, got {self.c}")


def _dist(x, y) -> float:
    r = float(np.linalg.norm(np.asarray(x, float) - np.asarray(y, float)))
    if r == 0.0:
        raise ValueError("kernel is singular at coincident points")
    return r


def kernel_u(x, y, t: float, s: float, p: KernelParams) -> float:
    r = _dist(x, y)
    return trunc_pow(p.c * (t - s) - r, p.d) / r


def kernel_w(x, y, t: float, s: float, p: KernelParams) -> np.ndarray:
    """grad_y of kernel_u, zero before the wavefront arrives."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    r = _dist(x, y)
    T = p.c * (t - s)
    d = p.d
    scale = d * trunc_pow(T - r, d - 1) * T - (d - 1) * trunc_pow(T - r, d)
    return scale * (x - y) / r**3


def kernel_u_deriv(p_order: int, x, y, t: float, s: float, p: KernelParams) -> float:
    """Scaled derivative U^(p) = (1/(c^p p!)) d^p U/dt^p = C(d,p) (c(t-s)-r)^{d-p} / r.

    Valid in the smooth regime c(t-s) > r; returns 0 when the truncation
    is active (consistent with differentiating the zero branch).
    """
    if not 0 <= p_order <= p.d:
        raise ValueError(f"derivative order must be in [0, {p.d}], got {p_order}")
    r = _dist(x, y)
    T = p.c * (t - s)
    if T - r <= 0.0:
        return 0.0
    return comb(p.d, p_order) * (T - r) ** (p.d - p_order) / r


def taylor_shift(x, y, t: float, t_target: float, s: float, p: KernelParams) -> float:
    """Evaluate U at t_target from the finite expansion around t.

    Exact (a binomial identity) as long as both times are in the smooth
    regime; raises if either side sits behind the wavefront.
    """
    r = _dist(x, y)
    if p.c * (t - s) - r <= 0.0 or p.c * (t_target - s) - r <= 0.0:
        raise ValueError("Taylor shift invalid across the causality boundary")
    shift = p.c * (t_target - t)
    return sum(
        kernel_u_deriv(q, x, y, t, s, p) * shift**q for q in range(p.d + 1)
    )
