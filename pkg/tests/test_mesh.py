import numpy as np
import pytest

from tdwavebem.mesh import MeshError, TriMesh, check_orientation, load_mesh, mesh_stats
from tdwavebem.shapes import hollow_box, icosphere


def test_planar_triangle_identities():
    m = TriMesh(np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0]]), np.array([[0, 1, 2]]))
    np.testing.assert_allclose(m.centroids[0], [1 / 3, 1 / 3, 0])
    np.testing.assert_allclose(m.normals[0], [0, 0, 1])
    assert m.areas[0] == pytest.approx(0.5)


def test_degenerate_triangle_rejected():
    verts = np.array([[0.0, 0, 0], [1, 0, 0], [2, 0, 0]])
    with pytest.raises(MeshError, match="element index 0"):
        TriMesh(verts, np.array([[0, 1, 2]]))


def test_obj_round_trip(tmp_path):
    path = tmp_path / "tri.obj"
    path.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
    m = load_mesh(path)
    assert m.n_elements == 1
    np.testing.assert_allclose(m.normals[0], [0, 0, 1])


def test_obj_quad_rejected(tmp_path):
    path = tmp_path / "quad.obj"
    path.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
    with pytest.raises(MeshError, match="non-triangle"):
        load_mesh(path)


def test_msh_parser(tmp_path):
    content = """$MeshFormat
2.2 0 8
$EndMeshFormat
$Nodes
3
1 0 0 0
2 1 0 0
3 0 1 0
$EndNodes
$Elements
1
1 2 2 0 1 1 2 3
$EndElements
"""
    path = tmp_path / "tri.msh"
    path.write_text(content)
    m = load_mesh(path)
    assert m.n_elements == 1
    assert m.areas[0] == pytest.approx(0.5)


def test_msh_quad_rejected(tmp_path):
    content = """$MeshFormat
2.2 0 8
$EndMeshFormat
$Nodes
4
1 0 0 0
2 1 0 0
3 1 1 0
4 0 1 0
$EndNodes
$Elements
1
1 3 2 0 1 1 2 3 4
$EndElements
"""
    path = tmp_path / "quad.msh"
    path.write_text(content)
    with pytest.raises(MeshError, match="non-triangle"):
        load_mesh(path)


def test_icosphere_counts_and_diameter():
    m = icosphere(12, radius=0.5, centre=(0.5, 0.0, 0.0))
    assert m.n_elements == 2880
    st = mesh_stats(m)
    assert 0.98 <= st.max_diameter <= 1.0 + 1e-12
    assert st.max_diameter >= st.max_edge > 0


def test_mesh_stats_two_triangles():
    verts = np.array([[0.0, 0, 0], [2, 0, 0], [1, 1, 0], [1, -1, 0]])
    tris = np.array([[0, 1, 2], [0, 3, 1]])
    st = mesh_stats(TriMesh(verts, tris))
    assert st.max_diameter == pytest.approx(2.0)


def test_single_triangle_diameter_is_longest_edge():
    m = TriMesh(np.array([[0.0, 0, 0], [3, 0, 0], [0, 1, 0]]), np.array([[0, 1, 2]]))
    st = mesh_stats(m)
    assert st.max_diameter == pytest.approx(st.max_edge)


@pytest.mark.parametrize("mesh_fn", [lambda: icosphere(4), hollow_box])
def test_closed_surface_invariants(mesh_fn):
    m = mesh_fn()
    check_orientation(m)
    resultant = (m.areas[:, None] * m.normals).sum(axis=0)
    assert np.linalg.norm(resultant) <= 1e-9 * m.areas.sum()


def test_orientation_check_fails_on_flipped():
    m = icosphere(2)
    flipped = TriMesh(m.vertices, m.triangles[:, ::-1])
    with pytest.raises(MeshError):
        check_orientation(flipped)


def test_centroid_inside_triangle():
    m = icosphere(2)
    v0, v1, v2 = m.element_vertices()
    # barycentric coordinates of the centroid are exactly (1/3, 1/3, 1/3)
    np.testing.assert_allclose(m.centroids, (v0 + v1 + v2) / 3, atol=1e-14)
