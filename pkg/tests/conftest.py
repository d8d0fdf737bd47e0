import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_states(rng, n, d=2, det_range=(0.2, 5.0), z_range=(0.05, 0.95)):
    """Random deformation gradients with det in det_range, paired contents."""
    A = rng.normal(size=(n, d, d))
    Q, _ = np.linalg.qr(A)
    s = np.exp(rng.uniform(-0.6, 0.6, size=(n, d)))
    F = np.einsum("nij,nj->nij", Q, s)
    target = np.exp(rng.uniform(np.log(det_range[0]), np.log(det_range[1]), size=n))
    J = np.linalg.det(F)
    F *= (target / np.abs(J))[:, None, None] ** (1.0 / d)
    neg = np.linalg.det(F) < 0
    F[neg, 0, :] *= -1.0
    z = rng.uniform(z_range[0], z_range[1], size=n)
    return F, z
