"""B-spline temporal basis on uniform knots.

The order-d basis is evaluated through its decomposition into d+2
truncated power functions, which is the form the retarded-potential
element integrals consume.  A classical Cox-de Boor recursion is kept
alongside as an independent oracle.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "BSplineBasis",
    "decomposition_weights",
    "decomposition_weights_exact",
    "trunc_pow",
    "eval_basis",
    "eval_basis_oracle",
]


def decomposition_weights_exact(d: int) -> list[Fraction]:
    """Exact decomposition weights w^{kappa,d}, kappa = 0..d+1.

    Computed in integer arithmetic to avoid cancellation in the product
    of signed integers for larger d.
    """
    if d < 1:
        raise ValueError(f"basis order must be >= 1, got {d}")
    weights = []
    for kappa in range(d + 2):
        denom = 1
        for k in range(d + 2):
            if k != kappa:
                denom *= k - kappa
        weights.append(Fraction(d + 1, denom))
    return weights


def decomposition_weights(d: int) -> np.ndarray:
    """Decomposition weights as float64, kappa = 0..d+1."""
    return np.array([float(w) for w in decomposition_weights_exact(d)])


def trunc_pow(x, d: int):
    """Truncated power (x)_+^d: x**d for x > 0, else 0 (0 at x = 0)."""
    x = np.asarray(x, dtype=float)
    out = np.where(x > 0.0, x, 0.0) ** d
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class BSplineBasis:
    """Uniform-knot B-spline basis of order ``d`` with step ``dt``.

    Knots are t_i = i*dt for all integer i; the basis N^{beta,d} has
    support [t_beta, t_{beta+d+1}].
    """

    d: int
    dt: float

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"basis order must be >= 1, got {self.d}")
        if self.dt <= 0.0:
            raise ValueError(f"time step must be positive, got {self.dt}")

    @property
    def weights(self) -> np.ndarray:
        return decomposition_weights(self.d)

    def knot(self, i: int) -> float:
        return i * self.dt


def eval_basis(basis: BSplineBasis, beta: int, t) -> float | np.ndarray:
    """Evaluate N^{beta,d}(t) via the truncated-power decomposition.

    Outside the support [t_beta, t_{beta+d+1}] the result is exactly 0;
    the decomposition is only summed in the interior, where it is free
    of the large-argument cancellation of the raw power sum.
    """
    d, dt = basis.d, basis.dt
    w = basis.weights
    t = np.asarray(t, dtype=float)
    inside = (t > beta * dt) & (t < (beta + d + 1) * dt)
    val = np.zeros_like(t)
    if np.any(inside):
        ts = t[inside] if t.ndim else t
        acc = np.zeros_like(np.atleast_1d(ts))
        for kappa in range(d + 2):
            acc += w[kappa] * trunc_pow((ts - (kappa + beta) * dt) / dt, d)
        if t.ndim:
            val[inside] = acc
        else:
            val = acc[0]
    if t.ndim == 0:
        return float(val) if not np.isscalar(val) else float(val)
    return val


def eval_basis_oracle(basis: BSplineBasis, beta: int, t: float) -> float:
    """Cox-de Boor recursion on uniform knots (independent oracle)."""
    d, dt = basis.d, basis.dt

    def rec(i: int, k: int, x: float) -> float:
        if k == 0:
            return 1.0 if i * dt <= x < (i + 1) * dt else 0.0
        left = (x - i * dt) / (k * dt) * rec(i, k - 1, x)
        right = ((i + k + 1) * dt - x) / (k * dt) * rec(i + 1, k - 1, x)
        return left + right

    return rec(beta, d, float(t))
