"""Semi-analytic references for sphere scattering and the error metric.

The transient reference is synthesised from the frequency-domain sphere
series on a damped contour: u(t) = e^{sigma t} g(t), where g has spectrum
u_hat(omega + i sigma).  Damping makes the periodic FFT wrap-around
negligible for a causal signal.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import eval_legendre, hankel1, jv

__all__ = [
    "SphereScenario",
    "IncidentPulse",
    "reference_solution",
    "rel_l2_error",
    "arc_evaluation_indices",
]


@dataclass(frozen=True)
class SphereScenario:
    radius: float = 0.5
    centre: tuple = (0.5, 0.0, 0.0)
    bc: str = "neumann"
    pulse_length: float = 0.5
    c: float = 1.0

    def __post_init__(self):
        if self.radius <= 0 or self.pulse_length <= 0:
            raise ValueError("radius and pulse length must be positive")
        if self.bc not in ("dirichlet", "neumann"):
            raise ValueError(f"unknown boundary condition {self.bc!r}")


@dataclass(frozen=True)
class IncidentPulse:
    """Plane pulse travelling in +x1: 0.5 (1 - Cos(2 pi (c t - x1) / L)).

    Cos coincides with cos inside one period of its argument and is 1
    outside, so the pulse occupies the band 0 <= c t - x1 <= L and is C^1
    at both edges.
    """

    pulse_length: float = 0.5
    c: float = 1.0

    def _phase(self, x, t):
        x = np.asarray(x, float)
        xi = self.c * t - x[..., 0]
        inside = (xi >= 0.0) & (xi <= self.pulse_length)
        return xi, inside

    def value(self, x, t):
        xi, inside = self._phase(x, t)
        return np.where(inside, 0.5 * (1.0 - np.cos(2 * np.pi * xi / self.pulse_length)), 0.0)

    def gradient(self, x, t):
        # u depends on (c t - x1), so d/dx1 = -(1/c) d/dt
        xi, inside = self._phase(x, t)
        g1 = np.where(inside, -np.pi / self.pulse_length * np.sin(2 * np.pi * xi / self.pulse_length), 0.0)
        out = np.zeros(np.shape(np.asarray(x, float)))
        out[..., 0] = g1
        return out

    def time_derivative(self, x, t):
        xi, inside = self._phase(x, t)
        return np.where(
            inside,
            np.pi * self.c / self.pulse_length * np.sin(2 * np.pi * xi / self.pulse_length),
            0.0)

    def normal_derivative(self, x, normals, t):
        return np.einsum("...k,...k->...", self.gradient(x, t), np.asarray(normals, float))

    def spectrum(self, kappa):
        """Analytic transform int f(xi) e^{i kappa xi} dxi of the pulse profile."""
        L = self.pulse_length
        a = 2 * np.pi / L

        def E(mu):
            mu = np.asarray(mu, dtype=complex)
            small = np.abs(mu) * L < 1e-8
            safe = np.where(small, 1.0, mu)
            full = (np.exp(1j * safe * L) - 1.0) / (1j * safe)
            series = L * (1.0 + 1j * mu * L / 2.0 - (mu * L) ** 2 / 6.0)
            return np.where(small, series, full)

        kappa = np.asarray(kappa, dtype=complex)
        return 0.5 * E(kappa) - 0.25 * E(kappa + a) - 0.25 * E(kappa - a)


def _sph_jn(n, z):
    return np.sqrt(np.pi / (2 * z)) * jv(n + 0.5, z)


def _sph_hn(n, z):
    return np.sqrt(np.pi / (2 * z)) * hankel1(n + 0.5, z)


def _ratio_terms(bc: str, ka, n_use: int):
    """Per-mode surface factors for the total field on the sphere.

    Dirichlet: [j_n' - (j_n/h_n) h_n'](ka)  (flux needs an extra factor k)
    Neumann:   [j_n - (j_n'/h_n') h_n](ka)  (total field value)
    """
    n = np.arange(n_use + 1)
    with np.errstate(over="ignore", invalid="ignore"):
        jn = _sph_jn(np.append(n, n_use + 1), ka)
        hn = _sph_hn(np.append(n, n_use + 1), ka)
        jp = n / ka * jn[:-1] - jn[1:]
        hp = n / ka * hn[:-1] - hn[1:]
        if bc == "dirichlet":
            out = jp - jn[:-1] / hn[:-1] * hp
        else:
            out = jn[:-1] - jp / hp * hn[:-1]
    # far beyond the convergence turnover h_n overflows; those modes are 0
    return np.where(np.isfinite(out), out, 0.0)


def reference_solution(scenario: SphereScenario, points, nt: int, dt: float,
                       n_cap: int | None = None, oversample: int = 8,
                       damping_decades: float = 8.0,
                       headroom: float = 2.0) -> np.ndarray:
    """Total-field reference on the sphere surface at the knot times.

    Returns (nt, n_points): u for the Neumann problem, q = du/dn for the
    Dirichlet problem.  The series order follows |ka| per frequency bin
    (n_cap overrides); bins with negligible pulse content are skipped.
    The synthesis window is ``headroom`` times the analysis window so the
    de-damped noise floor stays small at late times.
    """
    pulse = IncidentPulse(scenario.pulse_length, scenario.c)
    points = np.asarray(points, float)
    centre = np.asarray(scenario.centre, float)
    a, c = scenario.radius, scenario.c
    rel = points - centre
    rr = np.linalg.norm(rel, axis=1)
    if np.max(np.abs(rr - a)) > 0.05 * a:
        raise ValueError("reference evaluation points must lie on the sphere")
    cos_theta = rel[:, 0] / rr

    nf = 1
    while nf < headroom * oversample * nt:
        nf *= 2
    dts = dt / oversample
    t_syn = nf * dts
    sigma = np.log(10.0) * damping_decades / t_syn
    omega = 2 * np.pi * np.fft.rfftfreq(nf, d=dts) + 1j * sigma

    k = omega / c
    amp = pulse.spectrum(k) / c * np.exp(1j * k * centre[0])
    keep = np.abs(amp) > 1e-10 * np.abs(amp).max()

    ka_big = np.abs(k[keep]).max() * a
    n_top = n_cap if n_cap is not None else int(np.ceil(1.3 * ka_big)) + 30
    legendre = np.array([eval_legendre(n, cos_theta) for n in range(n_top + 1)])
    spec = np.zeros((len(omega), len(points)), dtype=complex)
    for idx in np.nonzero(keep)[0]:
        ka = k[idx] * a
        n_use = n_top if n_cap is not None else min(
            n_top, int(np.ceil(1.3 * abs(ka))) + 30)
        terms = _ratio_terms(scenario.bc, ka, n_use)
        if scenario.bc == "dirichlet":
            terms = terms * k[idx]
        series = np.zeros(len(points), dtype=complex)
        tail = 0
        converged = False
        for n in range(n_use + 1):
            contrib = (1j**n) * (2 * n + 1) * terms[n] * legendre[n]
            series += contrib
            if np.max(np.abs(contrib)) < 1e-12 * max(np.max(np.abs(series)), 1e-300):
                tail += 1
                if tail >= 3:
                    converged = True
                    break
            else:
                tail = 0
        if not converged and n_cap is None:
            raise RuntimeError(
                f"sphere series did not converge at |ka| = {abs(ka):.1f}")
        spec[idx] = amp[idx] * series

    # u(t) = e^{sigma t} (1/T) sum_k spec_k e^{-i omega_r t}; the k = 0 and
    # Nyquist bins carry half weight in the Hermitian sum
    weights = np.full(len(omega), 2.0)
    weights[0] = 1.0
    if nf % 2 == 0:
        weights[-1] = 1.0
    times = np.arange(nt) * dt
    phase = np.exp(-1j * np.outer(times, omega.real))
    out = np.empty((nt, len(points)))
    for p in range(len(points)):
        vals = phase @ (weights * spec[:, p])
        out[:, p] = np.real(vals) / t_syn * np.exp(sigma * times)
    return out


def scattered_field_value(scenario: SphereScenario, points, omega: complex,
                          n_max: int = 60) -> np.ndarray:
    """Scattered complex amplitude at ``points`` for a unit incident plane
    wave exp(i k x1), synthesis convention exp(-i omega t).  Test helper."""
    points = np.atleast_2d(np.asarray(points, float))
    centre = np.asarray(scenario.centre, float)
    a, c = scenario.radius, scenario.c
    k = omega / c
    rel = points - centre
    rr = np.linalg.norm(rel, axis=1)
    cos_theta = rel[:, 0] / rr
    out = np.zeros(len(points), dtype=complex)
    phase = np.exp(1j * k * centre[0])
    for n in range(n_max + 1):
        jn = _sph_jn(np.array([n, n + 1]), k * a)
        hn = _sph_hn(np.array([n, n + 1]), k * a)
        if scenario.bc == "dirichlet":
            refl = -jn[0] / hn[0]
        else:
            jp = n / (k * a) * jn[0] - jn[1]
            hp = n / (k * a) * hn[0] - hn[1]
            refl = -jp / hp
        term = (1j**n) * (2 * n + 1) * refl * _sph_hn(n, k * rr) * eval_legendre(n, cos_theta)
        out += term
        if np.max(np.abs(term)) < 1e-14 * max(np.max(np.abs(out)), 1e-300):
            break
    return phase * out


def rel_l2_error(numerical: np.ndarray, reference: np.ndarray) -> float:
    """sqrt(sum (v - vbar)^2) / sqrt(sum vbar^2) over points and steps."""
    numerical = np.asarray(numerical, float)
    reference = np.asarray(reference, float)
    if numerical.shape != reference.shape:
        raise ValueError("shape mismatch between solution and reference")
    denom = np.sqrt(np.sum(reference**2))
    if denom == 0.0:
        raise ZeroDivisionError("reference norm is zero")
    return float(np.sqrt(np.sum((numerical - reference) ** 2)) / denom)


def arc_evaluation_indices(mesh, scenario: SphereScenario, count: int = 33) -> np.ndarray:
    """Collocation points nearest to equidistant samples of the arc
    x2 = 0, x3 >= 0 running from the front to the back of the sphere."""
    centre = np.asarray(scenario.centre, float)
    angles = np.linspace(np.pi, 0.0, count)
    samples = centre + scenario.radius * np.stack(
        [np.cos(angles), np.zeros_like(angles), np.sin(angles)], axis=1)
    cent = mesh.centroids
    idx = np.empty(count, dtype=int)
    for i, p in enumerate(samples):
        idx[i] = int(np.argmin(np.sum((cent - p) ** 2, axis=1)))
    return idx
