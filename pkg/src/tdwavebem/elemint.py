"""Analytic retarded element coefficients and their quadrature oracle.

The single-layer coefficient over a triangle is split into three signed
sub-triangles at the perpendicular foot of the collocation point.  Each
sub-triangle reduces to a solid-angle term plus a closed-form
antiderivative evaluated at wavefront-clipped limits; the double-layer
and Burton-Miller variants are parameter derivatives of the same forms
(see tools/gen_closed_forms.py).

Conventions:
  * local frame per sub-triangle: x along V1->V2, z along the element
    normal, y = z cross x; y is signed and carries the orientation,
  * the collocation point is taken in the exterior limit (z -> 0+), so
    the 1/2 free term is absorbed into the self coefficients,
  * sub-triangles whose foot lies on the edge line (|y| below tolerance)
    contribute nothing and are skipped.
"""
from __future__ import annotations

import numpy as np

from ._closed_forms import BM_FORMS, UW_FORMS
from .tbasis import BSplineBasis

__all__ = [
    "single_layer_coeff",
    "double_layer_coeff",
    "bm_coeffs",
    "retarded_coeff_table",
    "quadrature_oracle",
]

_Y_TOL = 1e-12


def _edge_frames(P, A, B, C, ez):
    """Per-edge local coordinates for the three sub-triangles.

    Returns dict with arrays shaped (n, 3): x1, x2, y, plus (n,) z_signed
    and per-edge unit axes xhat, yhat with shape (n, 3, 3).
    """
    z_signed = np.einsum("ij,ij->i", P - A, ez)
    O = P - z_signed[:, None] * ez
    v1 = np.stack([A, B, C], axis=1)          # (n, 3 edges, 3)
    v2 = np.stack([B, C, A], axis=1)
    e = v2 - v1
    elen = np.linalg.norm(e, axis=2)
    xhat = e / elen[:, :, None]
    yhat = np.cross(np.broadcast_to(ez[:, None, :], xhat.shape), xhat)
    rel = v1 - O[:, None, :]
    x1 = np.einsum("nek,nek->ne", rel, xhat)
    x2 = x1 + elen
    y = np.einsum("nek,nek->ne", rel, yhat)
    return {
        "z": z_signed, "x1": x1, "x2": x2, "y": y,
        "xhat": xhat, "yhat": yhat, "elen": elen,
    }


def _clip_limits(x1, x2, y, za, s):
    """Wavefront clipping of the edge-parameter interval.

    The causal part of an edge satisfies r <= s, i.e. |x| <= xc with
    xc^2 = s^2 - y^2 - z^2.  Returns (xlo, xhi, fmask, m1, m2): clipped
    limits, activity mask, and masks telling whether each original limit
    is interior (needed for the moving-collocation derivatives).
    """
    xc2 = s * s - y * y - za * za
    has = xc2 > 0.0
    xc = np.sqrt(np.where(has, xc2, 0.0))
    xlo = np.clip(x1, -xc, xc)
    xhi = np.clip(x2, -xc, xc)
    fmask = has & (xhi > xlo)
    m1 = fmask & (x1 > -xc) & (x1 < xc)
    m2 = fmask & (x2 > -xc) & (x2 < xc)
    return xlo, xhi, fmask, m1, m2


def _masked_forms(form_fn, xa, y, za, s, mask):
    """Evaluate a closed-form bundle where mask is set, zeros elsewhere."""
    xs = np.where(mask, xa, 0.0)
    ys = np.where(mask, y, 1.0)
    zs = np.where(mask, za, 0.0)
    ss = np.where(mask, s, 2.0)
    vals = form_fn(xs, ys, zs, ss)
    return [np.where(mask, np.asarray(v, dtype=float), 0.0) for v in vals]


def retarded_coeff_table(P, A, B, C, ez, s, d, c, dt, which="uw", nx=None):
    """Vectorised retarded coefficients for a batch of configurations.

    Parameters
    ----------
    P : (n,3) collocation points
    A, B, C : (n,3) triangle vertices (winding consistent with ``ez``)
    ez : (n,3) unit element normals
    s : (n,) retarded radii c*t_gamma
    which : "uw" for (U, W), "bm" for the Burton-Miller pair
    nx : (n,3) collocation-element normals, required for "bm"

    Returns a pair of (n,) arrays.
    """
    P = np.atleast_2d(np.asarray(P, float))
    A = np.atleast_2d(np.asarray(A, float))
    B = np.atleast_2d(np.asarray(B, float))
    C = np.atleast_2d(np.asarray(C, float))
    ez = np.atleast_2d(np.asarray(ez, float))
    s = np.atleast_1d(np.asarray(s, float))
    if d not in UW_FORMS:
        raise ValueError(f"basis order d={d} not supported by the closed forms (d in 1..3)")
    if which == "bm":
        if nx is None:
            raise ValueError("bm coefficients need the collocation normal nx")
        nx = np.atleast_2d(np.asarray(nx, float))

    fr = _edge_frames(P, A, B, C, ez)
    z_signed = fr["z"]
    za = np.abs(z_signed)[:, None]
    # Collocation points structurally in the element plane (self element,
    # coplanar faces) resolve to the interior-side limit: the collocation
    # point sits just outside the exterior solution domain.  The tolerance
    # keeps roundoff-scale z from flipping the free-term side.
    zscale = np.max(fr["elen"], axis=1) + np.abs(z_signed)
    sgn = np.where(z_signed > 1e-12 * zscale, 1.0, -1.0)[:, None]
    sb = np.broadcast_to(s[:, None], fr["x1"].shape)
    x1, x2, y = fr["x1"], fr["x2"], fr["y"]
    zab = np.broadcast_to(za, x1.shape)

    scale = fr["elen"] + zab
    alive = (np.abs(y) > _Y_TOL * scale) & (sb > zab)

    xlo, xhi, fmask, m1, m2 = _clip_limits(x1, x2, y, zab, sb)
    fmask &= alive
    m1 &= alive
    m2 &= alive

    # solid-angle (I0) part: full angular range, no clipping
    with np.errstate(divide="ignore", invalid="ignore"):
        datan = np.arctan(x2 / y) - np.arctan(x1 / y)
    datan = np.where(alive, datan, 0.0)
    pw = np.where(alive, sb - zab, 0.0)  # (s - |z|)_+ on active edges

    K = 1.0 / (4.0 * np.pi * (c * dt) ** d)

    if which == "uw":
        F_lo, Fz_lo = _masked_forms(UW_FORMS[d], xlo, y, zab, sb, fmask)
        F_hi, Fz_hi = _masked_forms(UW_FORMS[d], xhi, y, zab, sb, fmask)
        a0 = -pw ** (d + 1) / (d + 1) * datan
        az = sgn * pw**d * datan
        U = K * np.sum(a0 + F_hi - F_lo, axis=1)
        W = -K * np.sum(az + sgn * (Fz_hi - Fz_lo), axis=1)
        return U, W

    if which != "bm":
        raise ValueError(f"unknown coefficient kind {which!r}")

    g_lo, gz_lo, Fy_lo, Fz_lo, Fs_lo, Fzy_lo, Fzz_lo, Fzs_lo = _masked_forms(
        BM_FORMS[d], xlo, y, zab, sb, fmask)
    g_hi, gz_hi, Fy_hi, Fz_hi, Fs_hi, Fzy_hi, Fzz_hi, Fzs_hi = _masked_forms(
        BM_FORMS[d], xhi, y, zab, sb, fmask)
    g_lo = np.where(m1, g_lo, 0.0)
    g_hi = np.where(m2, g_hi, 0.0)
    gz_lo = np.where(m1, gz_lo, 0.0)
    gz_hi = np.where(m2, gz_hi, 0.0)

    nx1 = np.einsum("nk,nek->ne", nx, fr["xhat"])
    nx2 = np.einsum("nk,nek->ne", nx, fr["yhat"])
    nx3 = np.einsum("nk,nk->n", nx, ez)[:, None]

    az = sgn * pw**d * datan
    a_s = -(pw**d) * datan
    azz = -d * pw ** (d - 1) * datan if d > 1 else -np.where(pw > 0, 1.0, 0.0) * datan
    azs = -sgn * azz
    # moving the collocation point by delta shifts every limit by -delta
    dPx = g_lo - g_hi
    dPy = -(Fy_hi - Fy_lo)
    dz = az + sgn * (Fz_hi - Fz_lo)
    ds = a_s + Fs_hi - Fs_lo
    ubar = K * np.sum(nx1 * dPx + nx2 * dPy + nx3 * dz - ds, axis=1)

    dzPx = sgn * (gz_lo - gz_hi)
    dzPy = -sgn * (Fzy_hi - Fzy_lo)
    dzz = azz + Fzz_hi - Fzz_lo
    dzs = azs + sgn * (Fzs_hi - Fzs_lo)
    wbar = -K * np.sum(nx1 * dzPx + nx2 * dzPy + nx3 * dzz - dzs, axis=1)
    return ubar, wbar


def _triangle_arrays(E):
    E = np.asarray(E, float)
    if E.shape != (3, 3):
        raise ValueError("triangle must be given as 3 vertices of 3 coordinates")
    n = np.cross(E[1] - E[0], E[2] - E[0])
    norm = np.linalg.norm(n)
    if norm == 0.0:
        raise ValueError("degenerate triangle")
    return E[0], E[1], E[2], n / norm


def single_layer_coeff(xi, E, gamma: int, basis: BSplineBasis, c: float) -> float:
    """U_ij^(gamma): retarded single-layer coefficient (0 for gamma <= 0)."""
    if gamma <= 0:
        return 0.0
    a, b, cc, n = _triangle_arrays(E)
    s = c * gamma * basis.dt
    U, _ = retarded_coeff_table(xi, a, b, cc, n, [s], basis.d, c, basis.dt)
    return float(U[0])


def double_layer_coeff(xi, E, gamma: int, basis: BSplineBasis, c: float) -> float:
    """W_ij^(gamma): retarded double-layer coefficient (0 for gamma <= 0)."""
    if gamma <= 0:
        return 0.0
    a, b, cc, n = _triangle_arrays(E)
    s = c * gamma * basis.dt
    _, W = retarded_coeff_table(xi, a, b, cc, n, [s], basis.d, c, basis.dt)
    return float(W[0])


def bm_coeffs(xi, nx, E, gamma: int, basis: BSplineBasis, c: float) -> tuple[float, float]:
    """Burton-Miller pair (Ubar, Wbar)_ij^(gamma); zeros for gamma <= 0."""
    if gamma <= 0:
        return 0.0, 0.0
    a, b, cc, n = _triangle_arrays(E)
    s = c * gamma * basis.dt
    ub, wb = retarded_coeff_table(
        xi, a, b, cc, n, [s], basis.d, c, basis.dt, which="bm", nx=[nx])
    return float(ub[0]), float(wb[0])


# ---------------------------------------------------------------------------
# adaptive polar quadrature oracle
# ---------------------------------------------------------------------------

def _gl_nodes(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


_GLX16, _GLW16 = _gl_nodes(16)
_GLX32, _GLW32 = _gl_nodes(32)


def _tpow(tr, e):
    """(x)_+^e with the e = 0 case as a wavefront indicator."""
    if e < 0:  # only ever multiplied by a zero coefficient
        return np.zeros_like(tr)
    if e == 0:
        return (tr > 0.0).astype(float)
    return np.where(tr > 0.0, tr, 0.0) ** e


def _polar_kernel(which, d, rr, z_signed, s):
    """Pointwise U/W kernels on the r-substituted radial grid."""
    tr = s - rr
    if which == "U":
        return _tpow(tr, d) / rr
    if which == "W":
        G = d * _tpow(tr, d - 1) * s - (d - 1) * _tpow(tr, d)
        return z_signed * G / rr**3
    raise ValueError(f"unknown kernel kind {which!r}")


def _sub_integral(which, d, x1, x2, y, z_signed, s, tol):
    """Adaptive integral over one sub-triangle in edge-parameter form."""
    za = abs(z_signed)
    if s <= za or abs(y) < _Y_TOL * (abs(x2 - x1) + za):
        return 0.0
    xc2 = s * s - y * y - za * za

    def panel(a, b, glx, glw):
        xm = 0.5 * (a + b) + 0.5 * (b - a) * glx
        wm = 0.5 * (b - a) * glw
        rho_edge = np.sqrt(xm**2 + y**2)
        r_edge = np.sqrt(rho_edge**2 + za**2)
        r_hi = np.minimum(r_edge, s)
        # radial integral r in [za, r_hi] (rho drho = r dr), geometrically
        # graded so the 1/r^k kernels stay resolved for small |z|
        lo = np.full_like(xm, za)
        inner = np.zeros_like(xm)
        guard = 0
        while np.any(lo < r_hi) and guard < 80:
            hi = np.minimum(np.maximum(2.0 * lo, lo + 1e-3 * s), r_hi)
            rm = 0.5 * (lo + hi)[:, None] + 0.5 * (hi - lo)[:, None] * _GLX32[None, :]
            wr = 0.5 * (hi - lo)[:, None] * _GLW32[None, :]
            kern = _polar_kernel(which, d, rm, z_signed, s)
            inner += np.sum(kern * rm * wr, axis=1)
            lo = hi
            guard += 1
        dtheta_dx = -y / (xm**2 + y**2)
        return float(np.sum(inner * dtheta_dx * wm))

    # panel breakpoints at the wavefront crossings of the edge line
    pts = [x1, x2]
    if xc2 > 0.0:
        xc = np.sqrt(xc2)
        for p in (-xc, xc):
            if x1 < p < x2:
                pts.append(p)
    pts = sorted(pts)

    total = 0.0
    stack = [(pts[i], pts[i + 1], 0) for i in range(len(pts) - 1)]
    coarse_total = sum(panel(a, b, _GLX16, _GLW16) for a, b, _ in stack)
    floor = max(abs(coarse_total), tol * s ** (d + 1))
    while stack:
        a, b, depth = stack.pop()
        coarse = panel(a, b, _GLX16, _GLW16)
        fine = panel(a, b, _GLX32, _GLW32)
        if abs(fine - coarse) <= tol * floor or depth >= 40:
            if depth >= 40 and abs(fine - coarse) > 1e3 * tol * floor:
                raise RuntimeError("quadrature oracle failed to converge")
            total += fine
        else:
            mid = 0.5 * (a + b)
            stack.append((a, mid, depth + 1))
            stack.append((mid, b, depth + 1))
    return total


def quadrature_oracle(xi, E, gamma: int, basis: BSplineBasis, c: float,
                      which: str = "U", nx=None, tol: float = 1e-11) -> float:
    """Adaptive polar quadrature of the retarded coefficients.

    Independent of the closed forms: the radial integral is numerical
    (graded Gauss-Legendre after the r-substitution) and the angular
    integral is adaptively bisected, split at the wavefront crossings.

    The Burton-Miller kinds are central differences of the U/W
    quadratures: for d = 1 the W kernel jumps at the wavefront, so its
    derivative carries an arc contribution that pointwise quadrature of
    the differentiated kernel cannot see.  Differencing the integrals
    keeps the oracle independent of the closed forms and captures it.
    """
    if gamma <= 0:
        return 0.0
    if which in ("BM-U", "BM-W"):
        base = {"BM-U": "U", "BM-W": "W"}[which]
        if nx is None:
            raise ValueError("BM oracle needs the collocation normal nx")
        xi = np.asarray(xi, float)
        nx = np.asarray(nx, float)
        Earr = np.asarray(E, float)
        scale = max(float(np.max(np.linalg.norm(Earr - Earr[0], axis=1))),
                    gamma * c * basis.dt)
        h = 4e-3 * scale
        # keep the stencil on one side of the element plane
        nrm = np.cross(Earr[1] - Earr[0], Earr[2] - Earr[0])
        nrm /= np.linalg.norm(nrm)
        z_off = abs(float(np.dot(xi - Earr[0], nrm)))
        if 0.0 < z_off < 16.0 * h:
            h = max(z_off / 16.0, 1e-6 * scale)
        ftol = min(tol, 1e-13)

        def dspace(step):
            return _oracle_at(xi + step * nx, Earr, gamma, basis, c, base, ftol)

        def dtime(step):
            return _oracle_at(xi, Earr, gamma + step / c / basis.dt, basis, c, base, ftol)

        def fd4(f, hh):
            return (-f(2 * hh) + 8 * f(hh) - 8 * f(-hh) + f(-2 * hh)) / (12.0 * hh)

        def fd6(f):
            return (16.0 * fd4(f, h / 2) - fd4(f, h)) / 15.0

        return fd6(dspace) - fd6(dtime)
    return _oracle_at(np.asarray(xi, float), np.asarray(E, float),
                      gamma, basis, c, which, tol)


def _oracle_at(xi, E, gamma: float, basis: BSplineBasis, c: float,
               which: str, tol: float) -> float:
    a, b, cc, n = _triangle_arrays(E)
    s = c * gamma * basis.dt
    d = basis.d
    fr = _edge_frames(xi[None, :], a[None, :], b[None, :], cc[None, :], n[None, :])
    z_signed = float(fr["z"][0])
    total = 0.0
    for e in range(3):
        total += _sub_integral(
            which, d,
            float(fr["x1"][0, e]), float(fr["x2"][0, e]), float(fr["y"][0, e]),
            z_signed, s, tol)
    return total / (4.0 * np.pi * (c * basis.dt) ** d)
