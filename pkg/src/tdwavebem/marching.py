"""Conventional time-marching TDBEM solver.

At every step the sparse system A x = b is solved, where A couples the
newest coefficient of each element through the lag-1 matrices and b
accumulates the retarded history через the kappa-summed variables tau
(from q) and sigma (from u).  The same machinery, restricted by a pair
filter, provides the near-field of the fast solver.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .elemint import retarded_coeff_table
from .mesh import TriMesh, mesh_stats
from .tbasis import BSplineBasis, eval_basis

__all__ = [
    "ProblemSpec",
    "RetardedMatrixSet",
    "TimeHistory",
    "compute_gamma_star",
    "build_retarded_matrices",
    "march",
]


@dataclass
class ProblemSpec:
    """Exterior scattering problem at the discrete level.

    phi[j] = 1 when u is unknown on element j (flux given); 0 when q is
    unknown (value given).  Boundary data callables return per-element
    samples for the known quantity at an arbitrary time.
    """

    mesh: TriMesh
    phi: np.ndarray
    bie: str
    basis: BSplineBasis
    c: float
    nt: int
    u_data: Callable[[float], np.ndarray] | None = None
    q_data: Callable[[float], np.ndarray] | None = None
    blowup_reference: float = 1.0

    def __post_init__(self):
        self.phi = np.asarray(self.phi, dtype=float)
        if self.phi.shape != (self.mesh.n_elements,):
            raise ValueError("phi must have one flag per element")
        if self.bie not in ("obie", "bmbie"):
            raise ValueError(f"unknown integral equation {self.bie!r}")
        if self.nt < 2:
            raise ValueError("need at least two time steps")
        ratio = mesh_stats(self.mesh).max_edge / (self.c * self.basis.dt)
        if ratio > 1.5:
            warnings.warn(
                f"mesh edge / (c dt) = {ratio:.2f} exceeds the usual "
                "stability guideline (~1)", stacklevel=2)


def compute_gamma_star(stats, basis: BSplineBasis, c: float) -> int:
    """Largest causally active time-difference index."""
    return int(np.ceil(stats.max_diameter / (c * basis.dt))) + basis.d + 1


@dataclass
class RetardedMatrixSet:
    """Per-lag sparse coefficient matrices.

    ``U[g]``/``W[g]`` hold the lag g+1 matrices (U multiplies tau, W
    multiplies sigma); for the Burton-Miller equation they hold the
    operator-applied variants.  Entries exist wherever the wavefront has
    reached the element (lower causality bound); the retarded kernels
    grow polynomially after passage, so no upper cutoff is applied to
    stored lags.
    """

    gamma_star: int
    U: list
    W: list

    @property
    def n_lags(self) -> int:
        return len(self.U)


def _arrival_sorted_pairs(mesh: TriMesh, c: float, dt: float, pairs,
                          gamma_max: int, block: int = 256):
    """Element pairs sorted by wavefront-arrival lag (int), filtered to
    those active within gamma_max."""
    cent = mesh.centroids
    radii = mesh.element_radii()
    ns = mesh.n_elements
    ii_parts, jj_parts, arr_parts = [], [], []
    if pairs is not None:
        chunks = [(np.asarray(pairs[0]), np.asarray(pairs[1]))]
    else:
        chunks = None
    if chunks is None:
        for start in range(0, ns, block):
            stop = min(start + block, ns)
            dist = np.linalg.norm(cent[start:stop, None, :] - cent[None, :, :], axis=2)
            dist = np.maximum(dist - radii[None, :], 0.0)
            arrival = np.maximum(np.ceil(dist / (c * dt)).astype(np.int32) - 1, 1)
            keep = arrival <= gamma_max
            li, lj = np.nonzero(keep)
            ii_parts.append((li + start).astype(np.int32))
            jj_parts.append(lj.astype(np.int32))
            arr_parts.append(arrival[li, lj])
    else:
        for ci, cj in chunks:
            dist = np.linalg.norm(cent[ci] - cent[cj], axis=1)
            dist = np.maximum(dist - radii[cj], 0.0)
            arrival = np.maximum(np.ceil(dist / (c * dt)).astype(np.int32) - 1, 1)
            keep = arrival <= gamma_max
            ii_parts.append(ci[keep].astype(np.int32))
            jj_parts.append(cj[keep].astype(np.int32))
            arr_parts.append(arrival[keep])
    ii = np.concatenate(ii_parts) if ii_parts else np.zeros(0, np.int32)
    jj = np.concatenate(jj_parts) if jj_parts else np.zeros(0, np.int32)
    arr = np.concatenate(arr_parts) if arr_parts else np.zeros(0, np.int32)
    order = np.argsort(arr, kind="stable")
    return ii[order], jj[order], arr[order]


def build_retarded_matrices(spec: ProblemSpec, gamma_max: int,
                            pairs=None, slab: int = 2_000_000) -> RetardedMatrixSet:
    """Assemble the lag-indexed sparse matrices for gamma = 1..gamma_max.

    ``pairs`` optionally restricts assembly to an (i_idx, j_idx) subset
    (the fast solver's near field).  Entries are created one lag before
    the conservative wavefront-arrival bound of the pair; U and W share
    their sparsity pattern per lag.
    """
    mesh, basis, c = spec.mesh, spec.basis, spec.c
    ns = mesh.n_elements
    dt = basis.dt
    v0, v1, v2 = mesh.element_vertices()
    normals = mesh.normals
    cent = mesh.centroids
    gstar = compute_gamma_star(mesh_stats(mesh), basis, c)

    ii, jj, arrival = _arrival_sorted_pairs(mesh, c, dt, pairs, gamma_max)
    U, W = [], []
    for g in range(1, gamma_max + 1):
        live = int(np.searchsorted(arrival, g, side="right"))
        if live == 0:
            U.append(sp.csr_matrix((ns, ns)))
            W.append(sp.csr_matrix((ns, ns)))
            continue
        bi, bj = ii[:live], jj[:live]
        uu = np.empty(live)
        ww = np.empty(live)
        for lo in range(0, live, slab):
            hi = min(lo + slab, live)
            s = np.full(hi - lo, g * c * dt)
            ci, cj = bi[lo:hi], bj[lo:hi]
            if spec.bie == "obie":
                uu[lo:hi], ww[lo:hi] = retarded_coeff_table(
                    cent[ci], v0[cj], v1[cj], v2[cj], normals[cj],
                    s, basis.d, c, dt)
            else:
                # the Burton-Miller normal points out of the exterior
                # solution domain, i.e. opposite the mesh normal
                uu[lo:hi], ww[lo:hi] = retarded_coeff_table(
                    cent[ci], v0[cj], v1[cj], v2[cj], normals[cj],
                    s, basis.d, c, dt, which="bm", nx=-normals[ci])
        Ug = sp.csr_matrix((uu, (bi, bj)), shape=(ns, ns))
        Wg = sp.csr_matrix((ww, (bi, bj)), shape=(ns, ns))
        # identical patterns: share the index arrays to save memory
        Wg.indices = Ug.indices
        Wg.indptr = Ug.indptr
        U.append(Ug)
        W.append(Wg)
    return RetardedMatrixSet(gamma_star=gstar, U=U, W=W)


@dataclass
class TimeHistory:
    """Coefficient histories and kappa-summed variables per time step."""

    basis: BSplineBasis
    nt: int
    n_elements: int
    u: np.ndarray = field(init=False)      # (nt-1, Ns) coefficients
    q: np.ndarray = field(init=False)
    tau: np.ndarray = field(init=False)
    sigma: np.ndarray = field(init=False)
    n_steps: int = 0
    status: str = "stable"

    def __post_init__(self):
        shape = (self.nt - 1, self.n_elements)
        self.u = np.zeros(shape)
        self.q = np.zeros(shape)
        self.tau = np.zeros(shape)
        self.sigma = np.zeros(shape)

    def stock_sums(self, beta: int) -> tuple[np.ndarray, np.ndarray]:
        """Full kappa sums tau/sigma at step beta (zero-padded history)."""
        w = self.basis.weights
        d = self.basis.d
        tau = np.zeros(self.n_elements)
        sig = np.zeros(self.n_elements)
        for k in range(min(d + 1, beta) + 1):
            tau += w[k] * self.q[beta - k]
            sig += w[k] * self.u[beta - k]
        return tau, sig

    def windowed_sums(self, beta: int, beta_star: int) -> tuple[np.ndarray, np.ndarray]:
        """kappa sums truncated at the sliding window bottom beta_star."""
        w = self.basis.weights
        kmax = min(self.basis.d + 1, beta - beta_star, beta)
        tau = np.zeros(self.n_elements)
        sig = np.zeros(self.n_elements)
        for k in range(kmax + 1):
            tau += w[k] * self.q[beta - k]
            sig += w[k] * self.u[beta - k]
        return tau, sig

    def tilde_sums(self, beta: int, phi: np.ndarray,
                   u_known: np.ndarray, q_known: np.ndarray):
        """Current-step sums with the unknown w0 component dropped."""
        w = self.basis.weights
        d = self.basis.d
        tau = w[0] * q_known * phi
        sig = w[0] * u_known * (1.0 - phi)
        for k in range(1, min(d + 1, beta) + 1):
            tau += w[k] * self.q[beta - k]
            sig += w[k] * self.u[beta - k]
        return tau, sig

    def finalize_step(self, beta: int, phi, u_known, q_known, solved):
        self.u[beta] = np.where(phi == 1.0, solved, u_known)
        self.q[beta] = np.where(phi == 1.0, q_known, solved)
        self.tau[beta], self.sigma[beta] = self.stock_sums(beta)

    def knot_values(self, kind: str = "u") -> np.ndarray:
        """B-spline series evaluated at the knots t_0..t_{nt-1}."""
        coef = self.u if kind == "u" else self.q
        d = self.basis.d
        bvals = [eval_basis(self.basis, 0, g * self.basis.dt) for g in range(d + 1)]
        out = np.zeros((self.nt, self.n_elements))
        for alpha in range(self.nt):
            for g in range(1, d + 1):
                beta = alpha - g
                if 0 <= beta < self.nt - 1:
                    out[alpha] += bvals[g] * coef[beta]
        return out


def greville_samples(spec: ProblemSpec) -> tuple[np.ndarray, np.ndarray]:
    """Known-data coefficient arrays sampled at the Greville abscissae.

    Direct collocation of the data would require inverting the banded
    B-spline evaluation stencil, whose recursion is unstable for d >= 3;
    Greville sampling is stable and second-order accurate.
    """
    basis = spec.basis
    nt, ns = spec.nt, spec.mesh.n_elements
    u_known = np.zeros((nt - 1, ns))
    q_known = np.zeros((nt - 1, ns))
    offset = 0.5 * (basis.d + 1) * basis.dt
    for beta in range(nt - 1):
        t = beta * basis.dt + offset
        if spec.u_data is not None:
            u_known[beta] = spec.u_data(t)
        if spec.q_data is not None:
            q_known[beta] = spec.q_data(t)
    return u_known, q_known


def build_step_matrix(spec: ProblemSpec, mats: RetardedMatrixSet):
    """A = w0 (W1 phi - U1 (1 - phi)) and its factorisation."""
    w0 = spec.basis.weights[0]
    phi = spec.phi
    A = (mats.W[0].multiply(phi[None, :]) - mats.U[0].multiply((1.0 - phi)[None, :]))
    A = (w0 * A).tocsc()
    try:
        lu = spla.splu(A)
    except RuntimeError as exc:
        raise RuntimeError(f"step matrix is singular: {exc}") from exc
    return A, lu


def march(spec: ProblemSpec, window: bool = True,
          blowup_factor: float = 1e6, mats: RetardedMatrixSet | None = None,
          rhs_trace: list | None = None) -> TimeHistory:
    """Run the conventional time marching.

    ``window=True`` applies the sliding history window at gamma_star with
    the bottom-of-window truncated sums; ``window=False`` keeps the whole
    history (identical results, more work) and is used by the equivalence
    tests.
    """
    stats = mesh_stats(spec.mesh)
    gstar = compute_gamma_star(stats, spec.basis, spec.c)
    n_lags = min(gstar, spec.nt - 1) if window else spec.nt - 1
    if mats is None:
        mats = build_retarded_matrices(spec, n_lags)
    elif mats.n_lags < n_lags:
        raise ValueError("matrix set does not cover the required lags")
    A, lu = build_step_matrix(spec, mats)

    hist = TimeHistory(spec.basis, spec.nt, spec.mesh.n_elements)
    u_known, q_known = greville_samples(spec)
    threshold = blowup_factor * max(spec.blowup_reference, 1e-30)

    for alpha in range(1, spec.nt):
        beta0 = alpha - 1
        beta_star = alpha - gstar if window else None
        tau_t, sig_t = hist.tilde_sums(beta0, spec.phi,
                                       u_known[beta0], q_known[beta0])
        b = mats.U[0] @ tau_t - mats.W[0] @ sig_t
        for g in range(2, min(alpha, n_lags) + 1):
            beta = alpha - g
            if window and beta_star is not None and beta - beta_star <= spec.basis.d:
                tau, sig = hist.windowed_sums(beta, beta_star)
            else:
                tau, sig = hist.tau[beta], hist.sigma[beta]
            b += mats.U[g - 1] @ tau - mats.W[g - 1] @ sig
        if rhs_trace is not None:
            rhs_trace.append(b.copy())
        x = lu.solve(b)
        resid = np.linalg.norm(A @ x - b)
        if resid > 1e-10 * max(np.linalg.norm(b), 1e-300):
            raise RuntimeError(f"step {alpha}: solve residual {resid:.3e} too large")
        hist.finalize_step(beta0, spec.phi, u_known[beta0], q_known[beta0], x)
        hist.n_steps = alpha
        if np.max(np.abs(x)) > threshold:
            hist.status = "unstable"
            break
    return hist
