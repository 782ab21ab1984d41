import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def random_hermitian(rng, n, kappa=10.0, scale=1.0, signs=None, complex_=True):
    """Hermitian matrix with spectrum magnitudes in [scale/kappa, scale]."""
    Z = rng.standard_normal((n, n))
    if complex_:
        Z = Z + 1j * rng.standard_normal((n, n))
    Q, _ = np.linalg.qr(Z)
    mags = np.concatenate([[1.0 / kappa, 1.0], rng.uniform(1.0 / kappa, 1.0, max(n - 2, 0))])[:n]
    if signs is None:
        signs = rng.choice([-1.0, 1.0], size=n)
    lam = scale * mags * signs
    A = (Q * lam) @ Q.conj().T
    return 0.5 * (A + A.conj().T)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def ns3x3():
    A = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]])
    return A, np.ones(3)
