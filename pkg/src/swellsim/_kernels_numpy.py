"""Pure-numpy implementations of the hot constitutive kernels.

Fallback path for environments without numba (or with SWELLSIM_PURE_NUMPY
set).  Function signatures and semantics match ``_kernels_numba`` exactly;
``tests/test_kernels_backends.py`` pins the two paths against each other.

Shapes: F is (n, d, d) with d in {1, 2, 3}; z and the swelling-stretch
arrays are (n,).  The coefficient vector for the volumetric-split stored
energy is laid out as

    params = [f10, f11, f20, f21, f30, f31, K, kappa, hquad, hlin]

with f_i(z) = f_i0 + f_i1*z affine softening factors, the compression term
kappa/det(F/lam), and h(z) = hquad*z^2/2 + hlin*z.
"""

import numpy as np


def det_batch(F):
    d = F.shape[-1]
    if d == 1:
        return F[:, 0, 0].copy()
    if d == 2:
        return F[:, 0, 0] * F[:, 1, 1] - F[:, 0, 1] * F[:, 1, 0]
    return (
        F[:, 0, 0] * (F[:, 1, 1] * F[:, 2, 2] - F[:, 1, 2] * F[:, 2, 1])
        - F[:, 0, 1] * (F[:, 1, 0] * F[:, 2, 2] - F[:, 1, 2] * F[:, 2, 0])
        + F[:, 0, 2] * (F[:, 1, 0] * F[:, 2, 1] - F[:, 1, 1] * F[:, 2, 0])
    )


def cof_batch(F):
    d = F.shape[-1]
    out = np.empty_like(F)
    if d == 1:
        out[:, 0, 0] = 1.0
        return out
    if d == 2:
        out[:, 0, 0] = F[:, 1, 1]
        out[:, 0, 1] = -F[:, 1, 0]
        out[:, 1, 0] = -F[:, 0, 1]
        out[:, 1, 1] = F[:, 0, 0]
        return out
    for i in range(3):
        i1, i2 = (i + 1) % 3, (i + 2) % 3
        for j in range(3):
            j1, j2 = (j + 1) % 3, (j + 2) % 3
            out[:, i, j] = F[:, i1, j1] * F[:, i2, j2] - F[:, i1, j2] * F[:, i2, j1]
    return out


def _trcof_sym(B):
    # trace of the cofactor of a symmetric matrix, per dimension
    d = B.shape[-1]
    if d == 1:
        return np.ones(B.shape[0])
    if d == 2:
        return B[:, 0, 0] + B[:, 1, 1]
    tr = B[:, 0, 0] + B[:, 1, 1] + B[:, 2, 2]
    tr2 = np.einsum("nij,nji->n", B, B)
    return 0.5 * (tr * tr - tr2)


def ogden_eval(F, z, lam, dlam, d2lam, params):
    """Stored energy density in total-strain form plus its derivatives.

    Returns (phi, dphi_dF, dphi_dz, d2phi_dzz) for the parametric family
    described in the module docstring, with the swelling stretch lam(z) and
    its first two derivatives supplied pointwise.
    """
    f10, f11, f20, f21, f30, f31, K, kappa, hquad, hlin = params
    n, d, _ = F.shape

    J = det_batch(F)
    cof = cof_batch(F)
    A1 = np.einsum("nij,nij->n", F, F)
    il = 1.0 / lam
    rl = dlam * il  # lam'/lam

    f1 = f10 + f11 * z
    f2 = f20 + f21 * z
    f3 = f30 + f31 * z

    phi = np.zeros(n)
    dF = np.zeros_like(F)
    dz = np.zeros(n)
    dzz = np.zeros(n)

    # first invariant: f1(z) * |F|^2 / lam^2
    il2 = il * il
    phi += f1 * A1 * il2
    dF += (2.0 * f1 * il2)[:, None, None] * F
    dz += A1 * il2 * (f11 - 2.0 * f1 * rl)
    dzz += A1 * il2 * (
        -4.0 * f11 * rl + 6.0 * f1 * rl * rl - 2.0 * f1 * d2lam * il
    )

    # second invariant: f2(z) * tr Cof(F F^T) / lam^(2d-2)
    s = 2 * (d - 1)
    if s == 0:
        phi += f2
        dz += f21
    else:
        B = np.einsum("nik,njk->nij", F, F)
        C2 = _trcof_sym(B)
        ils = il**s
        phi += f2 * C2 * ils
        if d == 2:
            dC2 = 2.0 * F
        else:
            trB = B[:, 0, 0] + B[:, 1, 1] + B[:, 2, 2]
            W = trB[:, None, None] * np.eye(3)[None] - B
            dC2 = 2.0 * np.einsum("nij,njk->nik", W, F)
        dF += (f2 * ils)[:, None, None] * dC2
        dz += C2 * ils * (f21 - s * f2 * rl)
        dzz += C2 * ils * (
            -2.0 * s * f21 * rl
            + s * (s + 1) * f2 * rl * rl
            - s * f2 * d2lam * il
        )

    # volumetric: f3(z) * K * (Je - 1)^2 with Je = det F / lam^d
    Je = J * il**d
    dJe = -d * Je * rl
    ddJe = d * Je * ((d + 1) * rl * rl - d2lam * il)
    G = K * (Je - 1.0) ** 2
    dG = 2.0 * K * (Je - 1.0)
    phi += f3 * G
    dF += (f3 * dG * il**d)[:, None, None] * cof
    dz += f31 * G + f3 * dG * dJe
    dzz += 2.0 * f31 * dG * dJe + f3 * 2.0 * K * (dJe * dJe + (Je - 1.0) * ddJe)

    # compression barrier: kappa / Je = kappa * lam^d / det F
    lamd = lam**d
    iJ = 1.0 / J
    phi += kappa * lamd * iJ
    dF += (-kappa * lamd * iJ * iJ)[:, None, None] * cof
    dz += kappa * d * lamd * rl * iJ
    dzz += kappa * d * lamd * ((d - 1) * rl * rl + d2lam * il) * iJ

    # content energy h(z)
    phi += 0.5 * hquad * z * z + hlin * z
    dz += hquad * z + hlin
    dzz += hquad

    return phi, dF, dz, dzz


def _smoothstep(u):
    v = np.clip(u, 0.0, 1.0)
    return np.where(u >= 1.0, 1.0, np.where(u <= 0.0, 0.0, v * v * (3.0 - 2.0 * v)))


def _smoothstep_prime(u):
    inside = (u > 0.0) & (u < 1.0)
    return np.where(inside, 6.0 * u - 6.0 * u * u, 0.0)


def chi_cutoff(F, eps):
    J = det_batch(F)
    normF = np.sqrt(np.einsum("nij,nij->n", F, F))
    return _smoothstep((2.0 * J - eps) / eps) * _smoothstep(2.0 - eps * normF)


def chi_cutoff_grad(F, eps):
    J = det_batch(F)
    cof = cof_batch(F)
    normF = np.sqrt(np.einsum("nij,nij->n", F, F))
    u1 = (2.0 * J - eps) / eps
    u2 = 2.0 - eps * normF
    s1, s2 = _smoothstep(u1), _smoothstep(u2)
    ds1, ds2 = _smoothstep_prime(u1), _smoothstep_prime(u2)
    safe = np.where(normF > 0.0, normF, 1.0)
    dchi = (ds1 * s2 * 2.0 / eps)[:, None, None] * cof - (
        s1 * ds2 * eps / safe
    )[:, None, None] * F
    return s1 * s2, dchi


def yosida_batch(z, k):
    return np.where(z > 1.0, k * (z - 1.0), np.where(z < 0.0, k * z, 0.0))


def yosida_prime(z, k):
    return np.where((z > 1.0) | (z < 0.0), k, 0.0)
