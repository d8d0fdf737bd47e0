"""Backend selection for the hot constitutive kernels.

The numba path is the default; setting the environment variable
SWELLSIM_PURE_NUMPY=1 (before import) selects the vectorized numpy fallback.
``BACKEND`` reports which one is live; ``benchmarks/bench_kernels.py`` times
the two against each other.
"""

import os


def _want_numba():
    flag = os.environ.get("SWELLSIM_PURE_NUMPY", "").strip().lower()
    if flag in ("1", "true", "yes", "on"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


if _want_numba():
    from . import _kernels_numba as _impl

    BACKEND = "numba"
else:
    from . import _kernels_numpy as _impl

    BACKEND = "numpy"

det_batch = _impl.det_batch
cof_batch = _impl.cof_batch
ogden_eval = _impl.ogden_eval
chi_cutoff = _impl.chi_cutoff
chi_cutoff_grad = _impl.chi_cutoff_grad
yosida_batch = _impl.yosida_batch
yosida_prime = _impl.yosida_prime
