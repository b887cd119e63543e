import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2, dtype=complex)


def kron_all(ops):
    out = np.eye(1, dtype=complex)
    for o in ops:
        out = np.kron(out, o)
    return out


def site(op, i, n):
    """op on 0-based qubit i, qubit 0 being the most significant bit."""
    return kron_all([op if j == i else I2 for j in range(n)])


def random_state(rng, n, real=False):
    v = rng.normal(size=2**n)
    if not real:
        v = v + 1j * rng.normal(size=2**n)
    return v / np.linalg.norm(v)


def same_ray(a, b, tol=1e-9):
    return abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b)) > 1 - tol


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
