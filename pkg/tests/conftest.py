import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_triangle(rng, min_doubled_area=0.05, span=0.5):
    """Random nondegenerate triangle."""
    while True:
        E = rng.uniform(-span, span, (3, 3))
        if np.linalg.norm(np.cross(E[1] - E[0], E[2] - E[0])) >= min_doubled_area:
            return E


def triangle_normal(E):
    n = np.cross(E[1] - E[0], E[2] - E[0])
    return n / np.linalg.norm(n)


def critical_radii(xi, E):
    """Radii at which the wavefront sphere around xi touches triangle features.

    Finite-difference oracles must keep the retarded radius away from
    these values (the coefficients lose smoothness there).
    """
    crits = []
    for k in range(3):
        crits.append(np.linalg.norm(xi - E[k]))
        v1, v2 = E[k], E[(k + 1) % 3]
        e = v2 - v1
        t = np.dot(xi - v1, e) / np.dot(e, e)
        if 0 < t < 1:
            crits.append(np.linalg.norm(xi - (v1 + t * e)))
    n = triangle_normal(E)
    crits.append(abs(np.dot(xi - E[0], n)))
    return np.array(crits)
