import numpy as np
import pytest

from tdwavebem.tbasis import BSplineBasis, decomposition_weights, eval_basis
from tdwavebem.elemint import (
    bm_coeffs,
    double_layer_coeff,
    quadrature_oracle,
    retarded_coeff_table,
    single_layer_coeff,
)

from conftest import critical_radii, random_triangle, triangle_normal

C = 1.0
DT = 0.05


def _random_config(rng, d, off_plane=0.05, kink_margin=0.05):
    """Random (xi, nx, E, gamma) with xi off-plane and away from kinks."""
    basis = BSplineBasis(d, DT)
    while True:
        E = random_triangle(rng)
        xi = rng.uniform(-1.0, 1.0, 3)
        n = triangle_normal(E)
        if abs(np.dot(xi - E[0], n)) < off_plane:
            xi = xi + 0.3 * n
        gamma = int(rng.integers(1, 40))
        s = gamma * C * DT
        scale = max(np.max(np.linalg.norm(E - E[0], axis=1)), s)
        if np.min(np.abs(critical_radii(xi, E) - s)) < kink_margin * scale:
            continue
        nx = rng.normal(size=3)
        nx /= np.linalg.norm(nx)
        return xi, nx, E, gamma, basis


def test_nonpositive_gamma_is_zero(rng):
    basis = BSplineBasis(2, DT)
    E = random_triangle(rng)
    xi = rng.uniform(-1, 1, 3)
    nx = np.array([1.0, 0, 0])
    assert single_layer_coeff(xi, E, 0, basis, C) == 0.0
    assert double_layer_coeff(xi, E, -3, basis, C) == 0.0
    assert bm_coeffs(xi, nx, E, 0, basis, C) == (0.0, 0.0)


def test_wavefront_not_arrived_is_zero():
    basis = BSplineBasis(1, DT)
    E = np.array([[0.0, 0, 0], [0.01, 0, 0], [0, 0.01, 0]])
    xi = np.array([0.0, 0.0, 10.0])
    gamma = 10  # s = 0.5 << 10
    assert single_layer_coeff(xi, E, gamma, basis, C) == 0.0
    assert double_layer_coeff(xi, E, gamma, basis, C) == 0.0


@pytest.mark.parametrize("d", [1, 2, 3])
def test_uw_match_oracle(rng, d):
    basis = BSplineBasis(d, DT)
    for _ in range(25):
        xi, nx, E, gamma, basis = _random_config(rng, d)
        for which, ana in (
            ("U", single_layer_coeff(xi, E, gamma, basis, C)),
            ("W", double_layer_coeff(xi, E, gamma, basis, C)),
        ):
            ora = quadrature_oracle(xi, E, gamma, basis, C, which=which)
            if abs(ora) > 1e-10:
                assert ana == pytest.approx(ora, rel=1e-9), (which, gamma)
            else:
                assert abs(ana - ora) < 1e-10


@pytest.mark.parametrize("d", [1, 2, 3])
def test_bm_match_oracle(rng, d):
    for _ in range(12):
        xi, nx, E, gamma, basis = _random_config(rng, d)
        ana_u, ana_w = bm_coeffs(xi, nx, E, gamma, basis, C)
        for which, ana in (("BM-U", ana_u), ("BM-W", ana_w)):
            ora = quadrature_oracle(xi, E, gamma, basis, C, which=which, nx=nx)
            if abs(ora) > 1e-8:
                assert ana == pytest.approx(ora, rel=1e-6), (which, gamma)
            else:
                assert abs(ana - ora) < 1e-8


@pytest.mark.parametrize("d", [1, 2, 3])
def test_self_element_double_layer_carries_free_term(rng, d):
    """For a flat element the self W coefficient is exactly the free-term
    contribution -gamma^d / 2 (interior-side limit; the in-plane dipole PV
    vanishes), so the kappa-weighted sum reproduces the B-spline free term."""
    basis = BSplineBasis(d, DT)
    E = random_triangle(rng)
    xi = E.mean(axis=0)
    for gamma in range(1, 8):
        w_self = double_layer_coeff(xi, E, gamma, basis, C)
        assert w_self == pytest.approx(-(gamma**d) / 2.0, rel=1e-12)
    w = decomposition_weights(d)
    for alpha in range(1, 6):
        summed = sum(
            w[k] * double_layer_coeff(xi, E, alpha - k, basis, C)
            for k in range(d + 2)
        )
        free = -0.5 * eval_basis(basis, 0, alpha * basis.dt)
        assert summed == pytest.approx(free, abs=1e-12)


def test_self_element_single_layer_matches_oracle(rng):
    for d in (1, 2, 3):
        basis = BSplineBasis(d, DT)
        E = random_triangle(rng)
        xi = E.mean(axis=0)
        for gamma in (1, 3, 9):
            ana = single_layer_coeff(xi, E, gamma, basis, C)
            ora = quadrature_oracle(xi, E, gamma, basis, C, which="U")
            assert ana == pytest.approx(ora, rel=1e-9)


def test_coplanar_double_layer_vanishes(rng):
    # collocation point in the element plane but outside the element
    basis = BSplineBasis(2, DT)
    E = np.array([[0.0, 0, 0], [0.4, 0, 0], [0.1, 0.5, 0]])
    xi = np.array([2.0, 1.0, 0.0])
    for gamma in (10, 30, 60):
        assert double_layer_coeff(xi, E, gamma, basis, C) == pytest.approx(0.0, abs=1e-13)


def test_near_singular_bm_matches_offset_oracle(rng):
    """Self-like configuration: collocation slightly above the centroid."""
    for d in (1, 2):
        basis = BSplineBasis(d, DT)
        E = random_triangle(rng)
        n = triangle_normal(E)
        eps = 2e-3
        xi = E.mean(axis=0) + eps * n
        gamma = 6
        if np.min(np.abs(critical_radii(xi, E) - gamma * C * DT)) < 0.01:
            gamma = 7
        ana_u, ana_w = bm_coeffs(xi, n, E, gamma, basis, C)
        ora_u = quadrature_oracle(xi, E, gamma, basis, C, which="BM-U", nx=n)
        ora_w = quadrature_oracle(xi, E, gamma, basis, C, which="BM-W", nx=n)
        assert ana_u == pytest.approx(ora_u, rel=1e-4)
        assert ana_w == pytest.approx(ora_w, rel=1e-4)


def test_self_bm_converges_to_plane_limit(rng):
    """The z = 0 analytic value is the interior-side limit: the collocation
    point sits just outside the exterior solution domain."""
    for d in (1, 2, 3):
        basis = BSplineBasis(d, DT)
        E = random_triangle(rng)
        n = triangle_normal(E)
        centroid = E.mean(axis=0)
        gamma = 5
        at_zero = np.array(bm_coeffs(centroid, n, E, gamma, basis, C))
        prev = None
        for eps in (1e-4, 1e-6, 1e-8):
            off = np.array(bm_coeffs(centroid - eps * n, n, E, gamma, basis, C))
            if prev is not None:
                assert np.linalg.norm(off - at_zero) <= np.linalg.norm(prev - at_zero) + 1e-12
            prev = off
        assert np.linalg.norm(prev - at_zero) < 1e-6 * max(1.0, np.linalg.norm(at_zero))


def test_large_time_saturation_d1(rng):
    """Once the wavefront passes the whole element, consecutive differences
    of the d=1 single-layer coefficient are constant in gamma."""
    basis = BSplineBasis(1, DT)
    E = random_triangle(rng)
    xi = rng.uniform(-1, 1, 3) + np.array([0, 0, 1.0])
    rmax = max(np.linalg.norm(xi - E[k]) for k in range(3))
    g0 = int(np.ceil(rmax / (C * DT))) + 2
    vals = [single_layer_coeff(xi, E, g, basis, C) for g in range(g0, g0 + 6)]
    diffs = np.diff(vals)
    np.testing.assert_allclose(diffs, diffs[0], rtol=1e-10)


def test_galerkin_style_symmetry(rng):
    """Double surface integral of the single-layer kernel is symmetric."""
    basis = BSplineBasis(1, DT)
    EA = random_triangle(rng)
    EB = random_triangle(rng) + np.array([0.0, 0.0, 0.8])
    gamma = 25
    # 7-point rule over the outer element, analytic inner integral
    from tdwavebem.fmm_interp import triangle_gauss_rule
    pts_a, w_a = triangle_gauss_rule(EA)
    pts_b, w_b = triangle_gauss_rule(EB)
    ab = sum(w * single_layer_coeff(p, EB, gamma, basis, C) for p, w in zip(pts_a, w_a))
    ba = sum(w * single_layer_coeff(p, EA, gamma, basis, C) for p, w in zip(pts_b, w_b))
    assert ab == pytest.approx(ba, rel=2e-3)


def test_batch_table_matches_scalar_ops(rng):
    d = 2
    basis = BSplineBasis(d, DT)
    configs = [_random_config(rng, d) for _ in range(10)]
    P = np.array([c[0] for c in configs])
    E = np.array([c[2] for c in configs])
    nz = np.array([triangle_normal(c[2]) for c in configs])
    nx = np.array([c[1] for c in configs])
    s = np.array([c[3] * C * DT for c in configs])
    U, W = retarded_coeff_table(P, E[:, 0], E[:, 1], E[:, 2], nz, s, d, C, DT)
    BU, BW = retarded_coeff_table(P, E[:, 0], E[:, 1], E[:, 2], nz, s, d, C, DT,
                                  which="bm", nx=nx)
    for i, (xi, nxi, Ei, gamma, basis) in enumerate(configs):
        assert U[i] == pytest.approx(single_layer_coeff(xi, Ei, gamma, basis, C), rel=1e-12, abs=1e-15)
        assert W[i] == pytest.approx(double_layer_coeff(xi, Ei, gamma, basis, C), rel=1e-12, abs=1e-15)
        bu, bw = bm_coeffs(xi, nxi, Ei, gamma, basis, C)
        assert BU[i] == pytest.approx(bu, rel=1e-12, abs=1e-15)
        assert BW[i] == pytest.approx(bw, rel=1e-12, abs=1e-15)
