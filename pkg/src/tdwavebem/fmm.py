"""Interpolation-based space-time FMM solver.

The far field is moved through multipole moments and local coefficients
on the space-time tree: P2M at the leaves when a time interval closes,
M2M upwards, M2L across interaction lists (near-future casts plus the
O(Nt) distant-future recurrence through derivative and auxiliary local
coefficients), L2L downwards, and L2P at the collocation steps.

Translation operators are block-Toeplitz: the dense matrix entries
depend only on node-index differences, so the matrix-vector product is
evaluated by a compiled contraction over a compact kernel tensor instead
of a materialised matrix.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from math import comb

import numba
import numpy as np
import scipy.sparse as sp

from .fmm_interp import InterpScheme, triangle_gauss_rule
from .fmm_tree import SpaceTimeTree, build_tree
from .marching import (ProblemSpec, RetardedMatrixSet, TimeHistory,
                       build_retarded_matrices, build_step_matrix,
                       compute_gamma_star, greville_samples)
from .mesh import mesh_stats
from .tbasis import trunc_pow

__all__ = ["FmmConfig", "fast_march", "cmp_coeff", "dense_m2l_matrix"]


@dataclass
class FmmConfig:
    ps: int = 8
    pt: int = 8
    leaf_capacity: int = 100
    mu: int = 8
    element_extrapolation: float = 1.0


def cmp_coeff(p: int, m: int, k: int) -> float:
    """Auxiliary recurrence coefficients of the distant-future update."""
    if not 0 <= m <= p - 2:
        raise ValueError(f"m must lie in [0, {p - 2}], got {m}")
    return float(comb(p, m) * ((k - 1) ** (p - m) - 2 * k ** (p - m)
                               + (k + 1) ** (p - m)) * (-1) ** m)


@numba.njit(cache=True, fastmath=True)
def _toeplitz_apply(K, M, L, toff):
    """L[a, m] += sum_{b, n} K[a-b+P, ..., m-n+toff] M[b, n]."""
    ps = M.shape[0]
    pt = M.shape[3]
    P = ps - 1
    for a1 in range(ps):
        for a2 in range(ps):
            for a3 in range(ps):
                for b1 in range(ps):
                    for b2 in range(ps):
                        for b3 in range(ps):
                            krow = K[a1 - b1 + P, a2 - b2 + P, a3 - b3 + P]
                            for m in range(pt):
                                acc = 0.0
                                for n in range(pt):
                                    acc += krow[m - n + toff] * M[b1, b2, b3, n]
                                L[a1, a2, a3, m] += acc


class _KernelCache:
    """Lazily built Toeplitz kernel tensors per (level, offset, order)."""

    def __init__(self, tree: SpaceTimeTree, basis_d: int, ps: int, pt: int):
        self.tree = tree
        self.d = basis_d
        self.ps, self.pt = ps, pt
        self.mu = tree.mu
        self._store: dict = {}
        delta = np.arange(-(ps - 1), ps)
        self._node_diff = 2.0 * delta / (ps - 1)

    def _positions(self, level: int, offset):
        h_s = self.tree.levels[level].half_width
        off = np.asarray(offset, float) * 2.0 * h_s
        g = h_s * self._node_diff
        dx = off[0] + g
        dy = off[1] + g
        dz = off[2] + g
        r = np.sqrt(dx[:, None, None] ** 2 + dy[None, :, None] ** 2
                    + dz[None, None, :] ** 2)
        return r

    def get(self, level: int, offset, p: int):
        key = (level, tuple(int(v) for v in offset), p)
        hit = self._store.get(key)
        if hit is not None:
            return hit
        c = self.tree.c
        interval = self.tree.interval(level)
        h_t = 0.5 * interval
        tick = interval / (self.pt - 1)   # node spacing along time
        r = self._positions(level, offset)
        if p == 0:
            taus = np.arange(0, (self.mu + 2) * (self.pt - 1) + 1)
            T = c * tick * taus
            K = trunc_pow(T[None, None, None, :] - r[:, :, :, None], self.d) \
                / r[:, :, :, None]
        else:
            base = self.mu * (self.pt - 1)
            taus = np.arange(base, base + 2 * (self.pt - 1) + 1)
            T = c * tick * taus
            diff = T[None, None, None, :] - r[:, :, :, None]
            if np.any(diff <= 0.0):
                raise RuntimeError(
                    "distant-future kernel sampled inside the causality "
                    "cone; the tree causality margin is broken")
            K = comb(self.d, p) * diff ** (self.d - p) / r[:, :, :, None]
        K = np.ascontiguousarray(K)
        self._store[key] = K
        return K

    def lag_is_dark(self, level: int, offset, lag: int) -> bool:
        """True when the whole lag window is before every wavefront."""
        h_s = self.tree.levels[level].half_width
        off = np.asarray(offset, float)
        gap = np.maximum(np.abs(off) - 1.0, 0.0) * 2.0 * h_s
        r_min = float(np.linalg.norm(gap))
        c, interval = self.tree.c, self.tree.interval(level)
        return c * (lag + 1) * interval <= r_min


def dense_m2l_matrix(tree: SpaceTimeTree, d: int, ps: int, pt: int,
                     level: int, offset, lag: int, p: int = 0) -> np.ndarray:
    """Materialised translation matrix (test reference for the compiled
    Toeplitz product)."""
    cache = _KernelCache(tree, d, ps, pt)
    K = cache.get(level, offset, p)
    if p == 0:
        toff = lag * (pt - 1)
    else:
        if lag != tree.mu + 1:
            raise ValueError("derivative operators exist at lag mu+1 only")
        toff = pt - 1
    dim = ps**3 * pt
    out = np.zeros((dim, dim))
    for a1 in range(ps):
        for a2 in range(ps):
            for a3 in range(ps):
                for m in range(pt):
                    row = ((a1 * ps + a2) * ps + a3) * pt + m
                    for b1 in range(ps):
                        for b2 in range(ps):
                            for b3 in range(ps):
                                for n in range(pt):
                                    col = ((b1 * ps + b2) * ps + b3) * pt + n
                                    out[row, col] = K[a1 - b1 + ps - 1,
                                                      a2 - b2 + ps - 1,
                                                      a3 - b3 + ps - 1,
                                                      m - n + toff]
    return out


class _LevelState:
    """Per-level expansion state: local rings and recurrence carriers."""

    def __init__(self, n_cells: int, ps: int, pt: int, d: int, mu: int):
        self.dims = (ps, ps, ps, pt)
        self.ring = mu + 3
        shape = (self.ring, n_cells, ps, ps, ps, pt)
        self.own = np.zeros(shape)
        self.inherit = np.zeros((4, n_cells, ps, ps, ps, pt))
        self.deriv = np.zeros((d, n_cells, ps, ps, ps, pt))
        self.aux = {(p, m): np.zeros((n_cells, ps, ps, ps, pt))
                    for p in range(2, d + 1) for m in range(p - 1)}
        self.moment_accum = np.zeros((n_cells, ps, ps, ps, pt))
        self.parent_accum = None  # created on demand at the parent level

    def own_slot(self, k: int) -> np.ndarray:
        return self.own[k % self.ring]

    def inherit_slot(self, k: int) -> np.ndarray:
        return self.inherit[k % 4]


@dataclass
class FmmReport:
    timings: dict = field(default_factory=dict)
    m2l_interval_times: list = field(default_factory=list)
    k_t: int = 0


class FastSolver:
    def __init__(self, spec: ProblemSpec, config: FmmConfig):
        self.spec = spec
        self.cfg = config
        self.c = spec.c
        self.d = spec.basis.d
        self.dt = spec.basis.dt
        self.report = FmmReport()
        t0 = time.perf_counter()
        self.tree = build_tree(spec.mesh, spec.c, spec.basis.dt,
                               config.leaf_capacity, config.mu)
        self.scheme_s = InterpScheme(config.ps)
        self.scheme_t = InterpScheme(config.pt)
        self.kernels = _KernelCache(self.tree, self.d, config.ps, config.pt)
        self._setup_near_field()
        self._setup_expansion_data()
        self.report.timings["setup"] = time.perf_counter() - t0

    # ------------------------------------------------------------------
    def _setup_near_field(self):
        spec, tree = self.spec, self.tree
        cent = spec.mesh.centroids
        radii = spec.mesh.element_radii()
        ii, jj = tree.near_pairs
        dist = np.linalg.norm(cent[ii] - cent[jj], axis=1) + radii[jj]
        self.gamma_near = int(np.ceil(dist.max() / (self.c * self.dt))) + self.d + 1
        t0 = time.perf_counter()
        self.near = build_retarded_matrices(spec, self.gamma_near,
                                            pairs=(ii, jj))
        self.extra: dict[int, RetardedMatrixSet] = {}
        self.extra_lags: dict[int, int] = {}
        for L, (ei, ej) in tree.extra_pairs.items():
            lags = int(np.floor(tree.interval(L) / self.dt)) + 1
            mats = build_retarded_matrices(spec, lags, pairs=(ei, ej))
            if mats.U[0].nnz or mats.W[0].nnz:
                raise RuntimeError(
                    "separated pair active at lag 1; the leaf cells are too "
                    "small relative to c*dt")
            self.extra[L] = mats
            self.extra_lags[L] = lags
        self.report.timings["near-field assembly"] = time.perf_counter() - t0
        self.A, self.lu = build_step_matrix(spec, self.near)

    # ------------------------------------------------------------------
    def _setup_expansion_data(self):
        tree, cfg = self.tree, self.cfg
        mesh = self.spec.mesh
        ps, pt = cfg.ps, cfg.pt
        leaf = tree.levels[tree.leaf_level]
        prefactor = 1.0 / (4.0 * np.pi * (self.c * self.dt) ** self.d)
        self.p2m_tau = []
        self.p2m_sig = []
        self.l2p_val = []
        self.l2p_bm = []
        v0, v1, v2 = mesh.element_vertices()
        ex = cfg.element_extrapolation
        for ci in range(leaf.n_cells):
            elems = leaf.cell_elems[ci]
            centre = leaf.centres[ci]
            h_s = leaf.half_width
            Pt = np.zeros((len(elems), ps, ps, ps))
            Pn = np.zeros((len(elems), ps, ps, ps))
            for local, e in enumerate(elems):
                pts, wts = triangle_gauss_rule(
                    np.stack([v0[e], v1[e], v2[e]]))
                xi = (pts - centre) / h_s
                wx = self.scheme_s.weights(xi[:, 0], ex)
                wy = self.scheme_s.weights(xi[:, 1], ex)
                wz = self.scheme_s.weights(xi[:, 2], ex)
                dwx = self.scheme_s.dweights(xi[:, 0], ex) / h_s
                dwy = self.scheme_s.dweights(xi[:, 1], ex) / h_s
                dwz = self.scheme_s.dweights(xi[:, 2], ex) / h_s
                n = mesh.normals[e]
                Pt[local] = np.einsum("g,ga,gb,gc->abc", wts, wx, wy, wz)
                Pn[local] = np.einsum("g,ga,gb,gc->abc", wts,
                                      n[0] * dwx, wy, wz)
                Pn[local] += np.einsum("g,ga,gb,gc->abc", wts,
                                       wx, n[1] * dwy, wz)
                Pn[local] += np.einsum("g,ga,gb,gc->abc", wts,
                                       wx, wy, n[2] * dwz)
            self.p2m_tau.append(prefactor * Pt.reshape(len(elems), -1))
            self.p2m_sig.append(prefactor * Pn.reshape(len(elems), -1))
            xi = (mesh.centroids[elems] - centre) / h_s
            wx = self.scheme_s.weights(xi[:, 0])
            wy = self.scheme_s.weights(xi[:, 1])
            wz = self.scheme_s.weights(xi[:, 2])
            val = np.einsum("ga,gb,gc->gabc", wx, wy, wz)
            self.l2p_val.append(val.reshape(len(elems), -1))
            if self.spec.bie == "bmbie":
                dwx = self.scheme_s.dweights(xi[:, 0]) / h_s
                dwy = self.scheme_s.dweights(xi[:, 1]) / h_s
                dwz = self.scheme_s.dweights(xi[:, 2]) / h_s
                nrm = -mesh.normals[elems]  # operator normal
                bm = np.einsum("g,ga,gb,gc->gabc", nrm[:, 0], dwx, wy, wz)
                bm += np.einsum("g,ga,gb,gc->gabc", nrm[:, 1], wx, dwy, wz)
                bm += np.einsum("g,ga,gb,gc->gabc", nrm[:, 2], wx, wy, dwz)
                self.l2p_bm.append(bm.reshape(len(elems), -1))
            else:
                self.l2p_bm.append(None)

        # per-level state and offset-grouped interaction lists
        self.state: dict[int, _LevelState] = {}
        self.groups: dict[int, dict] = {}
        for L in range(2, tree.leaf_level + 1):
            lev = tree.levels[L]
            self.state[L] = _LevelState(lev.n_cells, ps, pt, self.d, cfg.mu)
            groups: dict = {}
            if lev.il_obs is not None:
                for o, s, off in zip(lev.il_obs, lev.il_src, lev.il_offsets):
                    groups.setdefault(tuple(off), [[], []])
                    groups[tuple(off)][0].append(o)
                    groups[tuple(off)][1].append(s)
            self.groups[L] = {
                k: (np.array(v[0]), np.array(v[1])) for k, v in groups.items()}

        # spatial/temporal transfer tensors (child octant and half)
        self.t_space = [self.scheme_s.transfer(h) for h in (0, 1)]
        self.t_time = [self.scheme_t.transfer(h) for h in (0, 1)]

    # ------------------------------------------------------------------
    def _transfer_moment(self, M: np.ndarray, octant, half: int) -> np.ndarray:
        out = np.tensordot(self.t_space[octant[0]], M, axes=(1, 0))
        out = np.tensordot(self.t_space[octant[1]], out, axes=(1, 1)).transpose(1, 0, 2, 3)
        out = np.tensordot(self.t_space[octant[2]], out, axes=(1, 2)).transpose(1, 2, 0, 3)
        out = np.tensordot(self.t_time[half], out, axes=(1, 3)).transpose(1, 2, 3, 0)
        return out

    def _transfer_local(self, Lp: np.ndarray, octant, half: int) -> np.ndarray:
        out = np.tensordot(self.t_space[octant[0]].T, Lp, axes=(1, 0))
        out = np.tensordot(self.t_space[octant[1]].T, out, axes=(1, 1)).transpose(1, 0, 2, 3)
        out = np.tensordot(self.t_space[octant[2]].T, out, axes=(1, 2)).transpose(1, 2, 0, 3)
        out = np.tensordot(self.t_time[half].T, out, axes=(1, 3)).transpose(1, 2, 3, 0)
        return out

    # ------------------------------------------------------------------
    def _do_m2l(self, level: int, k: int, moments: np.ndarray):
        t0 = time.perf_counter()
        st = self.state[level]
        tree = self.tree
        mu = self.cfg.mu
        dcount = self.d
        T = self.c * tree.interval(level)
        tmp = np.zeros((dcount,) + moments.shape)
        live = np.linalg.norm(
            moments.reshape(len(moments), -1), axis=1) > 0.0
        pt = self.cfg.pt
        for off, (obs, src) in self.groups[level].items():
            K0 = self.kernels.get(level, off, 0)
            for l in range(1, mu + 2):
                if self.kernels.lag_is_dark(level, off, l):
                    continue
                toff = l * (pt - 1)
                slot = st.own_slot(k + l)
                for o, s in zip(obs, src):
                    if live[s]:
                        _toeplitz_apply(K0, moments[s], slot[o], toff)
            for p in range(1, dcount + 1):
                Kp = self.kernels.get(level, off, p)
                for o, s in zip(obs, src):
                    if live[s]:
                        _toeplitz_apply(Kp, moments[s], tmp[p - 1][o], pt - 1)
        # distant-future recurrence (Formula: derivative + auxiliary updates)
        for p in range(1, dcount + 1):
            upd = tmp[p - 1]
            for m in range(p - 1):
                upd = upd + cmp_coeff(p, m, k) * st.aux[(p, m)]
            st.deriv[p - 1] += upd
        newslot = st.own_slot(k + mu + 2)
        newslot[:] = st.own_slot(k + mu + 1)
        for p in range(1, dcount + 1):
            newslot += st.deriv[p - 1] * T**p
        for p in range(2, dcount + 1):
            for m in range(p - 1):
                st.aux[(p, m)] += tmp[p - 1] * float(k) ** m
        self.report.m2l_interval_times.append(time.perf_counter() - t0)

    # ------------------------------------------------------------------
    def _tick(self, k_leaf: int):
        tree = self.tree
        leaf = tree.leaf_level
        # upward: moments and same-level M2L, finest first
        completed = [leaf]
        moments = self.state[leaf].moment_accum.copy()
        self.state[leaf].moment_accum[:] = 0.0
        self._do_m2l(leaf, k_leaf, moments)
        cur_k = k_leaf
        L = leaf
        while L - 1 >= 2:
            parent_lev = tree.levels[L - 1]
            pst = self.state[L - 1]
            lev = tree.levels[L]
            half = cur_k & 1
            for ci in range(lev.n_cells):
                if not np.any(moments[ci]):
                    continue
                p = lev.parent[ci]
                octant = lev.coords[ci] - (parent_lev.coords[p] << 1)
                pst.moment_accum[p] += self._transfer_moment(
                    moments[ci], octant, half)
            if half == 0:
                break
            cur_k >>= 1
            L -= 1
            completed.append(L)
            moments = self.state[L].moment_accum.copy()
            self.state[L].moment_accum[:] = 0.0
            self._do_m2l(L, cur_k, moments)
        # downward: freshly final locals flow to the children, coarsest first
        for L in sorted(completed):
            if L + 1 > leaf:
                continue
            k_level = k_leaf >> (leaf - L)
            st = self.state[L]
            child_lev = tree.levels[L + 1]
            cst = self.state[L + 1]
            total = st.own_slot(k_level + 1) + st.inherit_slot(k_level + 1)
            for ci in range(child_lev.n_cells):
                p = child_lev.parent[ci]
                octant = child_lev.coords[ci] - (tree.levels[L].coords[p] << 1)
                for half in (0, 1):
                    k_child = 2 * (k_level + 1) + half
                    if np.any(total[p]):
                        cst.inherit_slot(k_child)[ci] = self._transfer_local(
                            total[p], octant, half)
                    else:
                        cst.inherit_slot(k_child)[ci] = 0.0

    # ------------------------------------------------------------------
    def run(self, window: bool = True, blowup_factor: float = 1e6,
            rhs_trace: list | None = None) -> TimeHistory:
        spec = self.spec
        tree = self.tree
        leaf = tree.leaf_level
        leaf_lev = tree.levels[leaf]
        interval = tree.interval(leaf)
        self.report.k_t = int(np.ceil(spec.nt * self.dt / interval))
        hist = TimeHistory(spec.basis, spec.nt, spec.mesh.n_elements)
        u_known, q_known = greville_samples(spec)
        threshold = blowup_factor * max(spec.blowup_reference, 1e-30)
        elem_cell = tree.element_cell(leaf)
        n_lags = self.gamma_near
        last_tick = -1
        t_solve = t_near = t_far = t_p2m = 0.0

        for alpha in range(1, spec.nt):
            t_alpha = alpha * self.dt
            beta0 = alpha - 1
            # close every source interval whose steps are all solved
            while (last_tick + 2) * interval <= t_alpha + 1e-12:
                self._tick(last_tick + 1)
                last_tick += 1

            t0 = time.perf_counter()
            beta_star = alpha - self.gamma_near
            tau_t, sig_t = hist.tilde_sums(beta0, spec.phi,
                                           u_known[beta0], q_known[beta0])
            b = self.near.U[0] @ tau_t - self.near.W[0] @ sig_t
            for g in range(2, min(alpha, n_lags) + 1):
                beta = alpha - g
                if window and beta - beta_star <= self.d:
                    tau, sig = hist.windowed_sums(beta, beta_star)
                else:
                    tau, sig = hist.tau[beta], hist.sigma[beta]
                b += self.near.U[g - 1] @ tau - self.near.W[g - 1] @ sig
            # same-interval contributions of separated pairs
            for L, mats in self.extra.items():
                int_L = tree.interval(L)
                k_now = int(np.floor(t_alpha / int_L + 1e-12))
                for g in range(1, min(alpha, self.extra_lags[L]) + 1):
                    t_src = (alpha - g) * self.dt
                    if int(np.floor(t_src / int_L + 1e-12)) != k_now:
                        break
                    if g == 1:
                        tau, sig = tau_t, sig_t
                    else:
                        tau, sig = hist.tau[alpha - g], hist.sigma[alpha - g]
                    b += mats.U[g - 1] @ tau - mats.W[g - 1] @ sig
            t_near += time.perf_counter() - t0

            # far field via the leaf locals
            t0 = time.perf_counter()
            k_obs = int(np.floor(t_alpha / interval + 1e-12))
            st = self.state[leaf]
            eta = (t_alpha - (k_obs + 0.5) * interval) / (0.5 * interval)
            wt = self.scheme_t.weights([eta])[0]
            own = st.own_slot(k_obs)
            inh = st.inherit_slot(k_obs)
            dwt = None
            if spec.bie == "bmbie":
                dwt = self.scheme_t.dweights([eta])[0] / (0.5 * interval * self.c)
            for ci in range(leaf_lev.n_cells):
                Lt = own[ci] + inh[ci]
                if not np.any(Lt):
                    continue
                flat = Lt.reshape(-1, self.cfg.pt)
                elems = leaf_lev.cell_elems[ci]
                if spec.bie == "obie":
                    b[elems] += self.l2p_val[ci] @ (flat @ wt)
                else:
                    b[elems] += self.l2p_bm[ci] @ (flat @ wt)
                    b[elems] -= self.l2p_val[ci] @ (flat @ dwt)
            t_far += time.perf_counter() - t0

            if rhs_trace is not None:
                rhs_trace.append(b.copy())
            t0 = time.perf_counter()
            x = self.lu.solve(b)
            resid = np.linalg.norm(self.A @ x - b)
            if resid > 1e-10 * max(np.linalg.norm(b), 1e-300):
                raise RuntimeError(f"step {alpha}: residual {resid:.3e}")
            hist.finalize_step(beta0, spec.phi, u_known[beta0],
                               q_known[beta0], x)
            hist.n_steps = alpha
            t_solve += time.perf_counter() - t0

            # accumulate this step's sources into the current leaf moments
            t0 = time.perf_counter()
            t_src = beta0 * self.dt
            k_src = int(np.floor(t_src / interval + 1e-12))
            eta_s = (t_src - (k_src + 0.5) * interval) / (0.5 * interval)
            wts = self.scheme_t.weights([eta_s])[0]
            for ci in range(leaf_lev.n_cells):
                elems = leaf_lev.cell_elems[ci]
                spat = (self.p2m_tau[ci] @ hist.tau[beta0][elems]
                        - self.p2m_sig[ci] @ hist.sigma[beta0][elems])
                if np.any(spat):
                    st.moment_accum[ci] += np.einsum(
                        "s,t->st", spat, wts).reshape(st.dims)
            t_p2m += time.perf_counter() - t0

            if np.max(np.abs(x)) > threshold:
                hist.status = "unstable"
                break

        self.report.timings.update({
            "near-field": t_near, "far-field L2P": t_far,
            "solve": t_solve, "P2M": t_p2m})
        return hist


def fast_march(spec: ProblemSpec, config: FmmConfig | None = None,
               window: bool = True, blowup_factor: float = 1e6,
               rhs_trace: list | None = None,
               return_solver: bool = False):
    """Drive the fast solver; mirrors ``march`` for the conventional path."""
    solver = FastSolver(spec, config or FmmConfig())
    hist = solver.run(window=window, blowup_factor=blowup_factor,
                      rhs_trace=rhs_trace)
    if return_solver:
        return hist, solver
    return hist
