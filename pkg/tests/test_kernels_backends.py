"""Pin the numba kernels against the pure-numpy fallback."""

import numpy as np
import pytest

from swellsim import _kernels_numpy as knp
from tests.conftest import random_states

numba_impl = pytest.importorskip("swellsim._kernels_numba")


@pytest.fixture
def states(rng):
    F, z = random_states(rng, 64, d=2)
    return np.ascontiguousarray(F), np.ascontiguousarray(z)


def test_det_cof_match(rng):
    for d in (1, 2, 3):
        F = np.ascontiguousarray(rng.normal(size=(40, d, d)))
        assert np.array_equal(knp.det_batch(F), numba_impl.det_batch(F))
        assert np.array_equal(knp.cof_batch(F), numba_impl.cof_batch(F))


@pytest.mark.parametrize("d", [1, 2, 3])
def test_ogden_eval_matches(rng, d):
    F, z = random_states(rng, 50, d=d)
    F = np.ascontiguousarray(F)
    params = np.array([0.9, -0.4, 0.2, -0.1, 1.0, -0.2, 1.3, 0.15, 1.1, 0.05])
    lam = 1.0 + 0.3 * z
    dlam = np.full_like(z, 0.3)
    d2lam = np.zeros_like(z)
    a = knp.ogden_eval(F, z, lam, dlam, d2lam, params)
    b = numba_impl.ogden_eval(F, z, lam, dlam, d2lam, params)
    for xa, xb in zip(a, b):
        assert np.allclose(xa, xb, rtol=1e-13, atol=1e-13)


def test_cutoff_and_yosida_match(states):
    F, z = states
    for eps in (0.05, 0.2, 0.6):
        assert np.allclose(
            knp.chi_cutoff(F, eps), numba_impl.chi_cutoff(F, eps), atol=1e-15
        )
        ca, da = knp.chi_cutoff_grad(F, eps)
        cb, db = numba_impl.chi_cutoff_grad(F, eps)
        assert np.allclose(ca, cb, atol=1e-15)
        assert np.allclose(da, db, atol=1e-13)
    zz = np.ascontiguousarray(np.linspace(-1.5, 2.5, 101))
    assert np.array_equal(knp.yosida_batch(zz, 40.0), numba_impl.yosida_batch(zz, 40.0))
    assert np.array_equal(knp.yosida_prime(zz, 40.0), numba_impl.yosida_prime(zz, 40.0))
