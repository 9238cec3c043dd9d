"""Built-in scenario geometries: geodesic spheres and the apertured hollow box.

Both generators return outward-oriented closed TriMesh surfaces so the
scattering scenarios are reproducible without an external mesher.
"""
from __future__ import annotations

import numpy as np

from .mesh import TriMesh

__all__ = ["icosphere", "hollow_box"]

_PHI = (1.0 + np.sqrt(5.0)) / 2.0

_ICO_VERTS = np.array([
    (-1, _PHI, 0), (1, _PHI, 0), (-1, -_PHI, 0), (1, -_PHI, 0),
    (0, -1, _PHI), (0, 1, _PHI), (0, -1, -_PHI), (0, 1, -_PHI),
    (_PHI, 0, -1), (_PHI, 0, 1), (-_PHI, 0, -1), (-_PHI, 0, 1),
], dtype=float)

_ICO_FACES = np.array([
    (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
    (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
    (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
    (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
], dtype=int)


def icosphere(frequency: int, radius: float = 0.5,
              centre=(0.5, 0.0, 0.0)) -> TriMesh:
    """Geodesic sphere: each icosahedron face split into frequency**2 triangles.

    Element count is 20 * frequency**2 (e.g. 8 -> 1280, 12 -> 2880,
    16 -> 5120, 24 -> 11520).
    """
    if frequency < 1:
        raise ValueError("subdivision frequency must be >= 1")
    n = frequency
    centre = np.asarray(centre, dtype=float)
    verts: list[np.ndarray] = []
    index: dict[tuple, int] = {}
    tris: list[tuple[int, int, int]] = []

    def vid(p: np.ndarray) -> int:
        key = tuple(np.round(p, 12))
        if key not in index:
            index[key] = len(verts)
            verts.append(p)
        return index[key]

    for fa, fb, fc in _ICO_FACES:
        a, b, c = _ICO_VERTS[fa], _ICO_VERTS[fb], _ICO_VERTS[fc]
        # barycentric grid points, projected onto the unit sphere
        grid = {}
        for i in range(n + 1):
            for j in range(n + 1 - i):
                p = (a * (n - i - j) + b * i + c * j) / n
                grid[(i, j)] = vid(p / np.linalg.norm(p))
        for i in range(n):
            for j in range(n - i):
                tris.append((grid[(i, j)], grid[(i + 1, j)], grid[(i, j + 1)]))
                if i + j < n - 1:
                    tris.append((grid[(i + 1, j)], grid[(i + 1, j + 1)], grid[(i, j + 1)]))

    pts = centre + radius * np.array(verts)
    return TriMesh(pts, np.array(tris, dtype=int))


def hollow_box(width: float = 1.0, depth: float = 0.5, height: float = 1.0,
               wall: float = 0.02,
               aperture_size=(0.1, 0.2), aperture_centre=(0.25, 0.25),
               partition_length: float = 0.5, partition_offset: float = 0.5,
               h: float = 0.04) -> TriMesh:
    """Closed surface of a hollow box with a top aperture and inner partition.

    The material solid is the wall shell of a width x depth x height box
    (wall thickness ``wall``), minus a rectangular aperture through the top
    wall, plus a partition slab of length ``partition_length`` hanging from
    the top inner face at ``partition_offset`` from the left wall.  Faces
    are meshed with target element size ``h``; neighbouring rectangles are
    subdivided independently (collocation elements need no vertex
    conformity).
    """
    W, D, H, T = width, depth, height, wall
    aw, ad = aperture_size
    acx, acy = aperture_centre
    F, G = partition_length, partition_offset

    ap_x = (acx - aw / 2.0, acx + aw / 2.0)
    ap_y = (acy - ad / 2.0, acy + ad / 2.0)
    part_x = (G, G + T)
    part_z = (H - T - F, H - T)

    xs = sorted({0.0, T, ap_x[0], ap_x[1], part_x[0], part_x[1], W - T, W})
    ys = sorted({0.0, T, ap_y[0], ap_y[1], D - T, D})
    zs = sorted({0.0, T, part_z[0], part_z[1], H - T, H})

    def material(cx: float, cy: float, cz: float) -> bool:
        inside_outer = 0 < cx < W and 0 < cy < D and 0 < cz < H
        if not inside_outer:
            return False
        in_cavity = T < cx < W - T and T < cy < D - T and T < cz < H - T
        in_partition = (part_x[0] < cx < part_x[1] and T < cy < D - T
                        and part_z[0] < cz < part_z[1])
        in_aperture = (ap_x[0] < cx < ap_x[1] and ap_y[0] < cy < ap_y[1]
                       and H - T < cz < H)
        if in_aperture:
            return False
        if in_cavity:
            return in_partition
        return True

    nx, ny, nz = len(xs) - 1, len(ys) - 1, len(zs) - 1
    solid = np.zeros((nx + 2, ny + 2, nz + 2), dtype=bool)
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                cx = 0.5 * (xs[i] + xs[i + 1])
                cy = 0.5 * (ys[j] + ys[j + 1])
                cz = 0.5 * (zs[k] + zs[k + 1])
                solid[i + 1, j + 1, k + 1] = material(cx, cy, cz)

    verts: list[tuple[float, float, float]] = []
    index: dict[tuple, int] = {}
    tris: list[tuple[int, int, int]] = []

    def vid(p) -> int:
        key = (round(p[0], 10), round(p[1], 10), round(p[2], 10))
        if key not in index:
            index[key] = len(verts)
            verts.append(key)
        return index[key]

    def emit_rect(origin, eu, ev, normal):
        # subdivide the rectangle at ~h and triangulate, winding outward
        lu, lv = np.linalg.norm(eu), np.linalg.norm(ev)
        mu, mv = max(1, int(np.ceil(lu / h))), max(1, int(np.ceil(lv / h)))
        du, dv = np.asarray(eu) / mu, np.asarray(ev) / mv
        origin = np.asarray(origin, dtype=float)
        flip = np.dot(np.cross(du, dv), normal) < 0
        for iu in range(mu):
            for iv in range(mv):
                p00 = origin + iu * du + iv * dv
                p10, p01, p11 = p00 + du, p00 + dv, p00 + du + dv
                a, b, c, d = vid(p00), vid(p10), vid(p11), vid(p01)
                if flip:
                    tris.extend([(a, d, c), (a, c, b)])
                else:
                    tris.extend([(a, b, c), (a, c, d)])

    breaks = (xs, ys, zs)
    for axis in range(3):
        ou, ov = [a for a in range(3) if a != axis]
        brk, u_brk, v_brk = breaks[axis], breaks[ou], breaks[ov]
        for plane in range(len(brk)):
            for j in range(len(u_brk) - 1):
                for k in range(len(v_brk) - 1):
                    below = [0, 0, 0]
                    below[axis] = plane       # padded index of the cell below
                    below[ou] = j + 1
                    below[ov] = k + 1
                    above = list(below)
                    above[axis] = plane + 1
                    lo, hi = solid[tuple(below)], solid[tuple(above)]
                    if lo == hi:
                        continue
                    origin = [0.0, 0.0, 0.0]
                    origin[axis] = brk[plane]
                    origin[ou] = u_brk[j]
                    origin[ov] = v_brk[k]
                    eu = np.zeros(3)
                    ev = np.zeros(3)
                    eu[ou] = u_brk[j + 1] - u_brk[j]
                    ev[ov] = v_brk[k + 1] - v_brk[k]
                    normal = np.zeros(3)
                    normal[axis] = 1.0 if lo else -1.0
                    emit_rect(origin, eu, ev, normal)

    return TriMesh(np.array(verts, dtype=float), np.array(tris, dtype=int))
