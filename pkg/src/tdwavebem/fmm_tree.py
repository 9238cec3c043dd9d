"""Space-time octree: uniform-depth spatial grid paired with per-level
time intervals of length (cell side)/c.

Interaction lists follow the classic rule (same level, parents adjacent,
cells not adjacent).  Because elements extend beyond their cells, two
causality margins are validated at build time:

  * distant-future margin: the Taylor expansion used from lag mu+2
    onwards needs c*(mu * interval) to exceed the largest point pair
    distance of any interaction pair;
  * same-interval margin: source steps inside the observation interval
    are covered by the far field for no pair, so any interaction pair
    close enough to be causally active within one interval is collected
    into a per-level "extra" near-field list.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mesh import TriMesh

__all__ = ["SpaceTimeTree", "build_tree"]

MU = 8


@dataclass
class Level:
    level: int
    half_width: float                  # h_s: half the cell side
    coords: np.ndarray                 # (nc, 3) int cell coordinates
    centres: np.ndarray                # (nc, 3)
    parent: np.ndarray                 # (nc,) index into the coarser level
    children: list                     # per cell: list of finer-level indices
    cell_elems: list                   # per cell: element indices (leaf only)
    il_obs: np.ndarray = field(default=None)    # interaction pairs, observers
    il_src: np.ndarray = field(default=None)
    il_offsets: np.ndarray = field(default=None)  # (npair, 3) int offsets

    @property
    def side(self) -> float:
        return 2.0 * self.half_width

    @property
    def n_cells(self) -> int:
        return len(self.coords)


@dataclass
class SpaceTimeTree:
    mesh: TriMesh
    c: float
    dt: float
    root_centre: np.ndarray
    root_half: float
    levels: list
    leaf_level: int
    leaf_capacity: int
    mu: int = MU
    extra_pairs: dict = field(default_factory=dict)   # level -> (i_idx, j_idx)
    near_pairs: tuple = None                          # (i_idx, j_idx) incl. self

    def interval(self, level: int) -> float:
        """Time-interval length of a level: cell side over wave speed."""
        return self.levels[level].side / self.c

    def element_cell(self, level: int) -> np.ndarray:
        return self._elem_cell[level]


def _cell_coords(points, lo, side, n):
    idx = np.floor((points - lo) / side).astype(np.int64)
    return np.clip(idx, 0, n - 1)


def build_tree(mesh: TriMesh, c: float, dt: float, leaf_capacity: int = 100,
               mu: int = MU, max_depth: int = 10) -> SpaceTimeTree:
    cent = mesh.centroids
    lo = cent.min(axis=0)
    hi = cent.max(axis=0)
    centre = 0.5 * (lo + hi)
    root_half = 0.5 * float((hi - lo).max()) * (1 + 1e-9) + 1e-12

    # uniform leaf depth: smallest level where every cell holds <= capacity
    leaf_level = 0
    for L in range(max_depth + 1):
        n = 2**L
        side = 2 * root_half / n
        coords = _cell_coords(cent, centre - root_half, side, n)
        _, counts = np.unique(coords, axis=0, return_counts=True)
        leaf_level = L
        if counts.max() <= leaf_capacity:
            break
    else:
        raise RuntimeError("octree did not reach the leaf capacity")

    levels = []
    elem_cell = {}
    leaf_coords = _cell_coords(cent, centre - root_half,
                               2 * root_half / 2**leaf_level, 2**leaf_level)
    for L in range(leaf_level + 1):
        coords_L = leaf_coords >> (leaf_level - L)
        uniq, inverse = np.unique(coords_L, axis=0, return_inverse=True)
        elem_cell[L] = inverse
        side = 2 * root_half / 2**L
        centres = centre - root_half + (uniq + 0.5) * side
        cell_elems = [[] for _ in range(len(uniq))]
        if L == leaf_level:
            for e, ci in enumerate(inverse):
                cell_elems[ci].append(e)
            cell_elems = [np.array(v, dtype=np.int64) for v in cell_elems]
        levels.append(Level(L, side / 2, uniq, centres, None, None, cell_elems))

    # parent/children links
    for L in range(1, leaf_level + 1):
        fine, coarse = levels[L], levels[L - 1]
        lookup = {tuple(cc): i for i, cc in enumerate(coarse.coords)}
        fine.parent = np.array([lookup[tuple(cc >> 1)] for cc in fine.coords])
        coarse.children = [[] for _ in range(coarse.n_cells)]
        for i, p in enumerate(fine.parent):
            coarse.children[p].append(i)

    tree = SpaceTimeTree(mesh, c, dt, centre, root_half, levels, leaf_level,
                         leaf_capacity, mu)
    tree._elem_cell = elem_cell
    _build_interaction_lists(tree)
    _build_near_pairs(tree)
    _validate_causality(tree)
    return tree


def _build_interaction_lists(tree: SpaceTimeTree):
    for L in range(2, tree.leaf_level + 1):
        lev = tree.levels[L]
        lookup = {tuple(cc): i for i, cc in enumerate(lev.coords)}
        obs, src, offs = [], [], []
        for i, cc in enumerate(lev.coords):
            pc = cc >> 1
            for dx in range(-1, 2):
                for dy in range(-1, 2):
                    for dz in range(-1, 2):
                        qp = pc + np.array([dx, dy, dz])
                        for cx in range(2):
                            for cy in range(2):
                                for cz in range(2):
                                    qc = (qp << 1) + np.array([cx, cy, cz])
                                    off = qc - cc
                                    if np.max(np.abs(off)) <= 1:
                                        continue  # adjacent: handled finer
                                    j = lookup.get(tuple(qc))
                                    if j is not None:
                                        obs.append(i)
                                        src.append(j)
                                        offs.append(off)
        lev.il_obs = np.array(obs, dtype=np.int64)
        lev.il_src = np.array(src, dtype=np.int64)
        lev.il_offsets = (np.array(offs, dtype=np.int64)
                          if offs else np.zeros((0, 3), dtype=np.int64))


def _build_near_pairs(tree: SpaceTimeTree):
    lev = tree.levels[tree.leaf_level]
    lookup = {tuple(cc): i for i, cc in enumerate(lev.coords)}
    ii, jj = [], []
    for a, cc in enumerate(lev.coords):
        for dx in range(-1, 2):
            for dy in range(-1, 2):
                for dz in range(-1, 2):
                    b = lookup.get((cc[0] + dx, cc[1] + dy, cc[2] + dz))
                    if b is None:
                        continue
                    ea, eb = lev.cell_elems[a], lev.cell_elems[b]
                    ii.append(np.repeat(ea, len(eb)))
                    jj.append(np.tile(eb, len(ea)))
    tree.near_pairs = (np.concatenate(ii), np.concatenate(jj))


def _validate_causality(tree: SpaceTimeTree):
    mesh, c, dt = tree.mesh, tree.c, tree.dt
    rho = float(mesh.element_radii().max())
    for L in range(2, tree.leaf_level + 1):
        lev = tree.levels[L]
        if lev.il_obs is None or len(lev.il_obs) == 0:
            continue
        side = lev.side
        interval = tree.interval(L)
        # distant-future Taylor margin over the worst interaction pair
        pairdist = np.linalg.norm(
            lev.centres[lev.il_obs] - lev.centres[lev.il_src], axis=1)
        dmax = pairdist.max() + np.sqrt(3.0) * side + 2 * rho
        if c * tree.mu * interval <= dmax:
            raise RuntimeError(
                f"level {L}: interval gap mu={tree.mu} does not clear the "
                f"farthest interaction pair ({dmax:.3f} vs "
                f"{c * tree.mu * interval:.3f}); increase mu or rebalance "
                "the space-time hierarchy")
        # same-interval margin: collect marginal pairs into the extra list
        gaps = np.maximum(np.abs(lev.il_offsets) - 1, 0) * side
        boxgap = np.linalg.norm(gaps, axis=1)
        margin = c * (interval - dt)
        marginal = np.nonzero(boxgap - 2 * rho < margin)[0]
        if len(marginal) == 0:
            continue
        reach = c * interval + 2 * rho
        ii, jj = _marginal_element_pairs(tree, L, marginal, reach)
        if len(ii):
            tree.extra_pairs[L] = (ii, jj)


def _marginal_element_pairs(tree, L, marginal, reach):
    lev = tree.levels[L]
    cent = tree.mesh.centroids
    elem_cell = tree.element_cell(L)
    order = np.argsort(elem_cell, kind="stable")
    bounds = np.searchsorted(elem_cell[order], np.arange(lev.n_cells + 1))
    ii, jj = [], []
    for p in marginal:
        ea = order[bounds[lev.il_obs[p]]:bounds[lev.il_obs[p] + 1]]
        eb = order[bounds[lev.il_src[p]]:bounds[lev.il_src[p] + 1]]
        if not len(ea) or not len(eb):
            continue
        d = np.linalg.norm(cent[ea][:, None, :] - cent[eb][None, :, :], axis=2)
        keep = d <= reach
        ai, bj = np.nonzero(keep)
        ii.append(ea[ai])
        jj.append(eb[bj])
    if ii:
        return np.concatenate(ii), np.concatenate(jj)
    return np.zeros(0, np.int64), np.zeros(0, np.int64)
