import numpy as np
import pytest

from tdwavebem.kernels import (
    KernelParams,
    kernel_u,
    kernel_u_deriv,
    kernel_w,
    taylor_shift,
)


def test_kernel_u_values():
    p = KernelParams(c=1.0, d=1, dt=0.1)
    assert kernel_u([0, 0, 0], [1, 0, 0], 2.0, 0.0, p) == pytest.approx(1.0)
    p2 = KernelParams(c=1.0, d=2, dt=0.1)
    assert kernel_u([0, 0, 0], [0.5, 0, 0], 2.0, 0.0, p2) == pytest.approx(4.5)


def test_causality():
    p = KernelParams(c=1.0, d=2, dt=0.1)
    assert kernel_u([0, 0, 0], [1, 0, 0], 0.5, 0.0, p) == 0.0
    np.testing.assert_array_equal(
        kernel_w([0, 0, 0], [1, 0, 0], 0.5, 0.0, p), np.zeros(3))


def test_coincident_points_raise():
    p = KernelParams(c=1.0, d=1, dt=0.1)
    with pytest.raises(ValueError):
        kernel_u([1, 2, 3], [1, 2, 3], 1.0, 0.0, p)


def test_kernel_w_simple_value():
    p = KernelParams(c=1.0, d=1, dt=0.1)
    w = kernel_w([1, 0, 0], [0, 0, 0], 2.0, 0.0, p)
    np.testing.assert_allclose(w, [2.0, 0.0, 0.0])


def test_kernel_w_matches_gradient(rng):
    for d in (1, 2, 3):
        p = KernelParams(c=1.3, d=d, dt=0.1)
        for _ in range(40):
            x = rng.uniform(-1, 1, 3)
            y = rng.uniform(-1, 1, 3)
            r = np.linalg.norm(x - y)
            if r < 0.3:
                continue
            t = float(rng.uniform(r / p.c + 0.2, r / p.c + 3.0))
            h = 1e-5 * r
            grad_fd = np.zeros(3)
            for k in range(3):
                yp, ym = y.copy(), y.copy()
                yp[k] += h
                ym[k] -= h
                grad_fd[k] = (kernel_u(x, yp, t, 0.0, p) - kernel_u(x, ym, t, 0.0, p)) / (2 * h)
            w = kernel_w(x, y, t, 0.0, p)
            np.testing.assert_allclose(w, grad_fd, rtol=1e-6, atol=1e-8)


def test_kernel_u_deriv_values(rng):
    p = KernelParams(c=1.0, d=2, dt=0.1)
    x, y = np.zeros(3), np.array([0.7, 0, 0])
    assert kernel_u_deriv(0, x, y, 2.0, 0.0, p) == pytest.approx(
        kernel_u(x, y, 2.0, 0.0, p))
    # C(2,2) = 1 and zero exponent leave 1/r
    assert kernel_u_deriv(2, x, y, 2.0, 0.0, p) == pytest.approx(1 / 0.7)


def test_kernel_u_deriv_matches_fd(rng):
    for d in (1, 2, 3):
        p = KernelParams(c=1.7, d=d, dt=0.1)
        for _ in range(25):
            x = rng.uniform(-1, 1, 3)
            y = rng.uniform(-1, 1, 3)
            r = np.linalg.norm(x - y)
            if r < 0.3:
                continue
            t = float(rng.uniform(r / p.c + 0.5, r / p.c + 3.0))
            h = 1e-6
            fd = (kernel_u(x, y, t + h, 0.0, p) - kernel_u(x, y, t - h, 0.0, p)) / (2 * h)
            got = kernel_u_deriv(1, x, y, t, 0.0, p)
            assert got == pytest.approx(fd / p.c, rel=1e-6)


def test_taylor_shift_exact(rng):
    for d in (1, 2, 3):
        p = KernelParams(c=1.0, d=d, dt=0.05)
        for _ in range(40):
            x = rng.uniform(-1, 1, 3)
            y = rng.uniform(-1, 1, 3)
            r = np.linalg.norm(x - y)
            if r < 0.2:
                continue
            t = float(rng.uniform(r + 0.1, r + 2.0))
            t2 = t + float(rng.uniform(0.0, 5 * p.dt))
            want = kernel_u(x, y, t2, 0.0, p)
            got = taylor_shift(x, y, t, t2, 0.0, p)
            assert got == pytest.approx(want, rel=1e-12)


def test_taylor_shift_rejects_truncated_regime():
    p = KernelParams(c=1.0, d=1, dt=0.1)
    with pytest.raises(ValueError):
        taylor_shift([0, 0, 0], [1, 0, 0], 0.5, 2.0, 0.0, p)
