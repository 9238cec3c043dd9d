import numpy as np
import pytest

from tdwavebem.tbasis import (
    BSplineBasis,
    decomposition_weights,
    decomposition_weights_exact,
    eval_basis,
    eval_basis_oracle,
    trunc_pow,
)


def test_weight_tables():
    np.testing.assert_allclose(decomposition_weights(1), [1, -2, 1])
    np.testing.assert_allclose(decomposition_weights(2), [0.5, -1.5, 1.5, -0.5])
    np.testing.assert_allclose(
        decomposition_weights(3), [1 / 6, -2 / 3, 1, -2 / 3, 1 / 6])
    np.testing.assert_allclose(
        decomposition_weights(4),
        [1 / 24, -5 / 24, 5 / 12, -5 / 12, 5 / 24, -1 / 24])


def test_weights_sum_to_zero():
    for d in range(1, 9):
        assert sum(decomposition_weights_exact(d)) == 0


def test_weights_reject_bad_order():
    with pytest.raises(ValueError):
        decomposition_weights(0)


def test_trunc_pow():
    assert trunc_pow(2.0, 3) == 8.0
    assert trunc_pow(-1.0, 2) == 0.0
    assert trunc_pow(0.0, 1) == 0.0
    np.testing.assert_allclose(trunc_pow(np.array([-1.0, 0.5]), 2), [0.0, 0.25])


def test_hat_function_peak():
    basis = BSplineBasis(1, 0.25)
    assert eval_basis(basis, 0, 0.25) == pytest.approx(1.0, abs=1e-14)


def test_quadratic_value_at_mid_knot():
    basis = BSplineBasis(2, 0.1)
    assert eval_basis(basis, 0, 0.15) == pytest.approx(0.75, abs=1e-13)
    assert eval_basis_oracle(basis, 0, 0.15) == pytest.approx(0.75, abs=1e-13)


def test_support_is_exact():
    basis = BSplineBasis(3, 0.5)
    for t in (0.0, -0.7, 4 * 0.5, 12 * 0.5):
        assert eval_basis(basis, 0, t) == 0.0


def test_matches_cox_de_boor_oracle(rng):
    for _ in range(2000):
        d = int(rng.integers(1, 5))
        beta = int(rng.integers(0, 9))
        dt = float(rng.uniform(0.05, 2.0))
        basis = BSplineBasis(d, dt)
        t = float(rng.uniform(-dt, 12 * dt))
        a = eval_basis(basis, beta, t)
        b = eval_basis_oracle(basis, beta, t)
        assert abs(a - b) < 1e-12


def test_partition_of_unity():
    for d in (1, 2, 3):
        basis = BSplineBasis(d, 0.3)
        for t in np.linspace(0.5, 2.5, 17):
            total = sum(eval_basis(basis, beta, t) for beta in range(-d - 1, 10))
            assert total == pytest.approx(1.0, abs=1e-12)


def test_translational_invariance(rng):
    for d in (1, 2, 3):
        basis = BSplineBasis(d, 0.2)
        for _ in range(50):
            beta = int(rng.integers(0, 5))
            alpha = int(rng.integers(0, 5))
            gamma = int(rng.integers(0, 4))
            shift = float(rng.uniform(-0.3, 0.3))
            a = eval_basis(basis, beta, alpha * basis.dt + shift)
            b = eval_basis(basis, beta + gamma, (alpha + gamma) * basis.dt + shift)
            assert abs(a - b) < 1e-12


def test_annihilation_beyond_support(rng):
    # the weighted sum of plain (untruncated) powers vanishes past the support
    for d in (1, 2, 3, 4):
        w = decomposition_weights(d)
        for _ in range(50):
            beta = int(rng.integers(0, 4))
            x = float(rng.uniform((beta + d + 1) + 0.1, (beta + d + 1) + 30))
            total = sum(w[k] * (x - (k + beta)) ** d for k in range(d + 2))
            assert abs(total) <= 1e-10 * abs(x) ** d
