"""Triangulated closed-surface geometry and derived quantities.

Normals follow the file winding (right-hand rule = outward); nothing is
flipped automatically.  Collocation points are element centroids.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["TriMesh", "MeshStats", "load_mesh", "mesh_stats", "check_orientation"]


class MeshError(ValueError):
    pass


@dataclass(frozen=True)
class TriMesh:
    """Triangle surface mesh with per-element normals, centroids, areas."""

    vertices: np.ndarray      # (nv, 3)
    triangles: np.ndarray     # (ne, 3) int
    normals: np.ndarray = field(init=False)
    centroids: np.ndarray = field(init=False)
    areas: np.ndarray = field(init=False)

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=float)
        tris = np.asarray(self.triangles, dtype=np.int64)
        if verts.ndim != 2 or verts.shape[1] != 3:
            raise MeshError(f"vertices must be (n, 3), got {verts.shape}")
        if tris.ndim != 2 or tris.shape[1] != 3:
            raise MeshError(f"triangles must be (n, 3), got {tris.shape}")
        if tris.size and (tris.min() < 0 or tris.max() >= len(verts)):
            raise MeshError("triangle index out of range")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "triangles", tris)

        v0 = verts[tris[:, 0]]
        v1 = verts[tris[:, 1]]
        v2 = verts[tris[:, 2]]
        cross = np.cross(v1 - v0, v2 - v0)
        doubled = np.linalg.norm(cross, axis=1)
        bbox = verts.max(axis=0) - verts.min(axis=0) if len(verts) else np.zeros(3)
        eps_geom = 1e-12 * float(np.dot(bbox, bbox))
        bad = np.nonzero(doubled / 2.0 <= eps_geom)[0]
        if bad.size:
            raise MeshError(f"degenerate triangle at element index {bad[0]}")
        object.__setattr__(self, "normals", cross / doubled[:, None])
        object.__setattr__(self, "centroids", (v0 + v1 + v2) / 3.0)
        object.__setattr__(self, "areas", doubled / 2.0)

    @property
    def n_elements(self) -> int:
        return len(self.triangles)

    def element_vertices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        t = self.triangles
        return (self.vertices[t[:, 0]], self.vertices[t[:, 1]], self.vertices[t[:, 2]])

    def element_radii(self) -> np.ndarray:
        """Max distance from each centroid to its own vertices."""
        v0, v1, v2 = self.element_vertices()
        c = self.centroids
        return np.max(
            np.stack([
                np.linalg.norm(v0 - c, axis=1),
                np.linalg.norm(v1 - c, axis=1),
                np.linalg.norm(v2 - c, axis=1),
            ]),
            axis=0,
        )


@dataclass(frozen=True)
class MeshStats:
    max_diameter: float
    min_edge: float
    max_edge: float


def mesh_stats(mesh: TriMesh) -> MeshStats:
    """Diameter over vertices (exact for a polyhedral surface) and edge range."""
    verts = mesh.vertices
    used = np.unique(mesh.triangles)
    pts = verts[used]
    # chunked pairwise max distance; meshes here stay well under ~2e4 vertices
    dmax = 0.0
    step = 512
    for i in range(0, len(pts), step):
        block = pts[i : i + step]
        d2 = np.sum((block[:, None, :] - pts[None, :, :]) ** 2, axis=2)
        dmax = max(dmax, float(d2.max()))
    v0, v1, v2 = mesh.element_vertices()
    edges = np.concatenate([
        np.linalg.norm(v1 - v0, axis=1),
        np.linalg.norm(v2 - v1, axis=1),
        np.linalg.norm(v0 - v2, axis=1),
    ])
    return MeshStats(
        max_diameter=float(np.sqrt(dmax)),
        min_edge=float(edges.min()),
        max_edge=float(edges.max()),
    )


def check_orientation(mesh: TriMesh, tol: float = 1e-9) -> None:
    """Validate that the winding describes a closed, outward-oriented surface.

    Checks the divergence identity (sum of area-weighted normals vanishes)
    and that the total signed volume is positive.  Fails loudly; nothing
    is flipped automatically.
    """
    total_area = float(mesh.areas.sum())
    resultant = (mesh.areas[:, None] * mesh.normals).sum(axis=0)
    if np.linalg.norm(resultant) > tol * total_area:
        raise MeshError(
            "surface is not closed: area-weighted normals sum to "
            f"{np.linalg.norm(resultant):.3e} (tol {tol * total_area:.3e})"
        )
    v0, v1, v2 = mesh.element_vertices()
    volume = float(np.einsum("ij,ij->", v0, np.cross(v1, v2)) / 6.0)
    if volume <= 0.0:
        raise MeshError(
            f"signed volume {volume:.3e} <= 0: normals are not outward"
        )


def load_mesh(path: str | Path, fmt: str | None = None) -> TriMesh:
    """Load a triangle surface mesh from Gmsh MSH v2 ASCII or Wavefront OBJ."""
    path = Path(path)
    if fmt is None:
        fmt = {"msh": "gmsh-msh", "obj": "obj"}.get(path.suffix.lstrip(".").lower(), "")
    if fmt == "gmsh-msh":
        return _load_msh(path)
    if fmt == "obj":
        return _load_obj(path)
    raise MeshError(f"unsupported mesh format {fmt!r} for {path}")


def _load_msh(path: Path) -> TriMesh:
    lines = path.read_text().splitlines()
    it = iter(enumerate(lines, start=1))
    nodes: dict[int, np.ndarray] = {}
    tris: list[tuple[int, int, int]] = []

    def expect(cond, lineno, msg):
        if not cond:
            raise MeshError(f"{path}:{lineno}: {msg}")

    for lineno, line in it:
        tag = line.strip()
        if tag == "$MeshFormat":
            lineno, header = next(it)
            expect(header.split()[0].startswith("2"), lineno,
                   f"only MSH version 2 ASCII supported, got {header.split()[0]}")
            next(it)  # $EndMeshFormat
        elif tag == "$Nodes":
            lineno, count = next(it)
            for _ in range(int(count)):
                lineno, rec = next(it)
                parts = rec.split()
                expect(len(parts) == 4, lineno, "malformed node record")
                nodes[int(parts[0])] = np.array([float(v) for v in parts[1:]])
            next(it)  # $EndNodes
        elif tag == "$Elements":
            lineno, count = next(it)
            for _ in range(int(count)):
                lineno, rec = next(it)
                parts = rec.split()
                expect(len(parts) >= 3, lineno, "malformed element record")
                etype = int(parts[1])
                ntags = int(parts[2])
                conn = [int(v) for v in parts[3 + ntags:]]
                if etype == 2:
                    expect(len(conn) == 3, lineno, "triangle with wrong node count")
                    tris.append(tuple(conn))
                elif etype in (1, 15):
                    continue  # bounding edges / points carry no surface
                else:
                    raise MeshError(
                        f"{path}:{lineno}: non-triangle element "
                        f"(type {etype}) at element id {parts[0]}"
                    )
            next(it)  # $EndElements
    if not tris:
        raise MeshError(f"{path}: no triangle elements found")
    ids = sorted(nodes)
    remap = {nid: i for i, nid in enumerate(ids)}
    verts = np.array([nodes[nid] for nid in ids])
    conn = np.array([[remap[a], remap[b], remap[c]] for a, b, c in tris])
    return TriMesh(verts, conn)


def _load_obj(path: Path) -> TriMesh:
    verts: list[list[float]] = []
    tris: list[list[int]] = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "v":
            if len(parts) < 4:
                raise MeshError(f"{path}:{lineno}: malformed vertex")
            verts.append([float(v) for v in parts[1:4]])
        elif parts[0] == "f":
            refs = parts[1:]
            if len(refs) != 3:
                raise MeshError(
                    f"{path}:{lineno}: non-triangle element ({len(refs)} vertices)"
                )
            idx = []
            for ref in refs:
                v = ref.split("/")[0]
                i = int(v)
                idx.append(i - 1 if i > 0 else len(verts) + i)
            tris.append(idx)
    if not tris:
        raise MeshError(f"{path}: no faces found")
    return TriMesh(np.array(verts), np.array(tris))
