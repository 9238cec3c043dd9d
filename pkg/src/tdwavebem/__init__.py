"""Time-domain boundary element solver for the 3D scalar wave equation."""

from .mesh import TriMesh, MeshStats, load_mesh, mesh_stats, check_orientation
from .shapes import icosphere, hollow_box
from .tbasis import BSplineBasis, decomposition_weights, trunc_pow, eval_basis
from .kernels import KernelParams, kernel_u, kernel_w, kernel_u_deriv, taylor_shift

__all__ = [
    "TriMesh", "MeshStats", "load_mesh", "mesh_stats", "check_orientation",
    "icosphere", "hollow_box",
    "BSplineBasis", "decomposition_weights", "trunc_pow", "eval_basis",
    "KernelParams", "kernel_u", "kernel_w", "kernel_u_deriv", "taylor_shift",
]
