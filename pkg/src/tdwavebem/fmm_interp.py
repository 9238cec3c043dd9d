"""Cardinal interpolation scheme and element quadrature for the FMM.

Piecewise-cubic Hermite interpolation on uniform nodes in [-1, 1], with
slopes from second-order finite differences (one-sided at the ends).
The cardinal weights are exposed as dense rows so moments and locals can
be formed by plain matrix products.
"""
from __future__ import annotations

import numpy as np

__all__ = ["InterpScheme", "triangle_gauss_rule"]

# degree-5 rule on the reference triangle (barycentric points, weights)
_TRI7_BARY = np.array([
    [1 / 3, 1 / 3, 1 / 3],
    [0.059715871789770, 0.470142064105115, 0.470142064105115],
    [0.470142064105115, 0.059715871789770, 0.470142064105115],
    [0.470142064105115, 0.470142064105115, 0.059715871789770],
    [0.797426985353087, 0.101286507323456, 0.101286507323456],
    [0.101286507323456, 0.797426985353087, 0.101286507323456],
    [0.101286507323456, 0.101286507323456, 0.797426985353087],
])
_TRI7_W = np.array([
    0.225,
    0.132394152788506, 0.132394152788506, 0.132394152788506,
    0.125939180544827, 0.125939180544827, 0.125939180544827,
])


def triangle_gauss_rule(E) -> tuple[np.ndarray, np.ndarray]:
    """7-point degree-5 rule: returns (points (7,3), weights summing to area)."""
    E = np.asarray(E, float)
    area = 0.5 * np.linalg.norm(np.cross(E[1] - E[0], E[2] - E[0]))
    pts = _TRI7_BARY @ E
    return pts, _TRI7_W * area


class InterpScheme:
    """Cardinal piecewise-cubic Hermite interpolation on uniform nodes."""

    def __init__(self, p: int):
        if p < 4:
            raise ValueError(f"need at least 4 interpolation nodes, got {p}")
        self.p = p
        self.nodes = np.linspace(-1.0, 1.0, p)
        self.h = 2.0 / (p - 1)
        # slope stencil m = S f; fourth-order differences keep the slope
        # error below the cubic-segment error (one-sided near the ends)
        S = np.zeros((p, p))
        if p >= 5:
            for i in range(2, p - 2):
                S[i, i - 2: i + 3] = np.array([1, -8, 0, 8, -1]) / 12.0
            S[0, :5] = np.array([-25, 48, -36, 16, -3]) / 12.0
            S[1, :5] = np.array([-3, -10, 18, -6, 1]) / 12.0
            S[-2, -5:] = -np.array([-3, -10, 18, -6, 1])[::-1] / 12.0
            S[-1, -5:] = -np.array([-25, 48, -36, 16, -3])[::-1] / 12.0
        else:
            S[0, :4] = np.array([-11, 18, -9, 2]) / 6.0
            S[1, :4] = np.array([-2, -3, 6, -1]) / 6.0
            S[2, :4] = np.array([1, -6, 3, 2]) / 6.0
            S[3, :4] = np.array([-2, 9, -18, 11]) / 6.0
        self._stencil = S / self.h

    def weights(self, xi, extrapolate: float = 0.0) -> np.ndarray:
        """Cardinal weight rows: result[k, a] = l_a(xi[k]).

        Points slightly outside [-1, 1] (boundary elements protruding from
        their cell) are handled by the end segments' cubic extension, up
        to ``extrapolate`` beyond the interval.
        """
        xi = np.atleast_1d(np.asarray(xi, float))
        if np.any(np.abs(xi) > 1.0 + extrapolate + 1e-9):
            raise ValueError("interpolation point outside the allowed range")
        p, h = self.p, self.h
        seg = np.clip(((xi + 1.0) / h).astype(int), 0, p - 2)
        tau = (xi - self.nodes[seg]) / h
        h00 = 2 * tau**3 - 3 * tau**2 + 1
        h10 = tau**3 - 2 * tau**2 + tau
        h01 = -2 * tau**3 + 3 * tau**2
        h11 = tau**3 - tau**2
        out = np.zeros((len(xi), p))
        rows = np.arange(len(xi))
        np.add.at(out, (rows, seg), h00)
        np.add.at(out, (rows, seg + 1), h01)
        out += (h * h10)[:, None] * self._stencil[seg]
        out += (h * h11)[:, None] * self._stencil[seg + 1]
        return out

    def dweights(self, xi, extrapolate: float = 0.0) -> np.ndarray:
        """Derivative rows: result[k, a] = l_a'(xi[k])."""
        xi = np.atleast_1d(np.asarray(xi, float))
        if np.any(np.abs(xi) > 1.0 + extrapolate + 1e-9):
            raise ValueError("interpolation point outside the allowed range")
        p, h = self.p, self.h
        seg = np.clip(((xi + 1.0) / h).astype(int), 0, p - 2)
        tau = (xi - self.nodes[seg]) / h
        d00 = (6 * tau**2 - 6 * tau) / h
        d10 = 3 * tau**2 - 4 * tau + 1
        d01 = (-6 * tau**2 + 6 * tau) / h
        d11 = 3 * tau**2 - 2 * tau
        out = np.zeros((len(xi), p))
        rows = np.arange(len(xi))
        np.add.at(out, (rows, seg), d00)
        np.add.at(out, (rows, seg + 1), d01)
        out += d10[:, None] * self._stencil[seg]
        out += d11[:, None] * self._stencil[seg + 1]
        return out

    def transfer(self, half: int) -> np.ndarray:
        """Re-anchoring matrix T[a_parent, a_child] for one child half.

        Child nodes mapped into the parent frame ((xi - 1)/2 for half 0,
        (xi + 1)/2 for half 1) act as sources anchored on parent nodes.
        """
        mapped = (self.nodes + (2 * half - 1)) / 2.0
        return self.weights(mapped).T
