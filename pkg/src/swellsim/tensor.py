"""Dense d x d tensor algebra (d <= 3) and pointwise kinematic rates.

Second-order tensors are numpy arrays of shape (..., d, d); third-order ones
(..., d, d, d).  Every operation broadcasts over leading axes, so a single
matrix and a batch of per-quadrature-node matrices share one code path.
Closed forms only; no general-n linear algebra.
"""

import numpy as np

from .errors import SingularMatrix

__all__ = [
    "det",
    "cof",
    "inv",
    "sym",
    "trace",
    "frobenius",
    "jacobi_rate",
    "inverse_flow_rate",
]


def det(A):
    """Determinant, exact closed form for d in {1, 2, 3}."""
    A = np.asarray(A)
    d = A.shape[-1]
    if d == 1:
        return A[..., 0, 0] + 0.0
    if d == 2:
        return A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]
    if d == 3:
        return (
            A[..., 0, 0] * (A[..., 1, 1] * A[..., 2, 2] - A[..., 1, 2] * A[..., 2, 1])
            - A[..., 0, 1] * (A[..., 1, 0] * A[..., 2, 2] - A[..., 1, 2] * A[..., 2, 0])
            + A[..., 0, 2] * (A[..., 1, 0] * A[..., 2, 1] - A[..., 1, 1] * A[..., 2, 0])
        )
    raise ValueError(f"unsupported dimension d={d}")


def cof(A):
    """Cofactor matrix, satisfying A cof(A)^T = det(A) I."""
    A = np.asarray(A)
    d = A.shape[-1]
    out = np.empty_like(A, dtype=float)
    if d == 1:
        out[..., 0, 0] = 1.0
        return out
    if d == 2:
        out[..., 0, 0] = A[..., 1, 1]
        out[..., 0, 1] = -A[..., 1, 0]
        out[..., 1, 0] = -A[..., 0, 1]
        out[..., 1, 1] = A[..., 0, 0]
        return out
    if d == 3:
        for i in range(3):
            i1, i2 = (i + 1) % 3, (i + 2) % 3
            for j in range(3):
                j1, j2 = (j + 1) % 3, (j + 2) % 3
                out[..., i, j] = (
                    A[..., i1, j1] * A[..., i2, j2] - A[..., i1, j2] * A[..., i2, j1]
                )
        return out
    raise ValueError(f"unsupported dimension d={d}")


def frobenius(A):
    """Frobenius norm over the trailing two axes."""
    A = np.asarray(A)
    return np.sqrt(np.einsum("...ij,...ij->...", A, A))


def trace(A):
    A = np.asarray(A)
    return np.einsum("...ii->...", A)


def inv(A):
    """Inverse via cof(A)^T / det(A).

    Raises SingularMatrix when |det A| <= 1e-14 * ||A||^d (scale-aware
    degeneracy guard); the deformation gradients this package handles are
    required to keep det F > 0 well away from that floor.
    """
    A = np.asarray(A, dtype=float)
    d = A.shape[-1]
    dets = det(A)
    tol = 1e-14 * frobenius(A) ** d
    if np.any(np.abs(dets) <= tol):
        raise SingularMatrix(
            f"matrix (numerically) singular: min |det| = {np.min(np.abs(dets)):.3e}"
        )
    return np.swapaxes(cof(A), -1, -2) / dets[..., None, None]


def sym(G):
    """Symmetric part (G + G^T)/2; the small strain rate when G = grad v."""
    G = np.asarray(G)
    return 0.5 * (G + np.swapaxes(G, -1, -2))


def jacobi_rate(F, gradv):
    """Material rate of det F under the flow: (det F)' = det F * div v."""
    return det(F) * trace(gradv)


def inverse_flow_rate(Finv, gradv):
    """Material rate of F^{-1} under the flow: (F^{-1})' = -F^{-1} grad v."""
    return -np.matmul(Finv, gradv)
