"""Numba-compiled constitutive kernels (hot path).

Loop-per-node twins of ``_kernels_numpy``; selected by ``kernels`` unless the
SWELLSIM_PURE_NUMPY flag is set.  Keep the two modules in sync: the backend
equivalence tests compare them to machine precision.
"""

import numpy as np
from numba import njit

_JIT = dict(cache=True, fastmath=False)


@njit(**_JIT)
def _det1(F, q):
    return F[q, 0, 0]


@njit(**_JIT)
def _det2(F, q):
    return F[q, 0, 0] * F[q, 1, 1] - F[q, 0, 1] * F[q, 1, 0]


@njit(**_JIT)
def _det3(F, q):
    return (
        F[q, 0, 0] * (F[q, 1, 1] * F[q, 2, 2] - F[q, 1, 2] * F[q, 2, 1])
        - F[q, 0, 1] * (F[q, 1, 0] * F[q, 2, 2] - F[q, 1, 2] * F[q, 2, 0])
        + F[q, 0, 2] * (F[q, 1, 0] * F[q, 2, 1] - F[q, 1, 1] * F[q, 2, 0])
    )


@njit(**_JIT)
def det_batch(F):
    n, d, _ = F.shape
    out = np.empty(n)
    if d == 1:
        for q in range(n):
            out[q] = _det1(F, q)
    elif d == 2:
        for q in range(n):
            out[q] = _det2(F, q)
    else:
        for q in range(n):
            out[q] = _det3(F, q)
    return out


@njit(**_JIT)
def _cof_into(F, q, out):
    d = F.shape[1]
    if d == 1:
        out[q, 0, 0] = 1.0
    elif d == 2:
        out[q, 0, 0] = F[q, 1, 1]
        out[q, 0, 1] = -F[q, 1, 0]
        out[q, 1, 0] = -F[q, 0, 1]
        out[q, 1, 1] = F[q, 0, 0]
    else:
        for i in range(3):
            i1 = (i + 1) % 3
            i2 = (i + 2) % 3
            for j in range(3):
                j1 = (j + 1) % 3
                j2 = (j + 2) % 3
                out[q, i, j] = (
                    F[q, i1, j1] * F[q, i2, j2] - F[q, i1, j2] * F[q, i2, j1]
                )


@njit(**_JIT)
def cof_batch(F):
    n = F.shape[0]
    out = np.empty_like(F)
    for q in range(n):
        _cof_into(F, q, out)
    return out


@njit(**_JIT)
def ogden_eval(F, z, lam, dlam, d2lam, params):
    f10, f11, f20, f21, f30, f31 = (
        params[0],
        params[1],
        params[2],
        params[3],
        params[4],
        params[5],
    )
    K, kappa, hquad, hlin = params[6], params[7], params[8], params[9]
    n, d, _ = F.shape

    phi = np.zeros(n)
    dF = np.zeros_like(F)
    dz = np.zeros(n)
    dzz = np.zeros(n)
    cof = np.empty_like(F)
    for q in range(n):
        _cof_into(F, q, cof)

    s = 2 * (d - 1)
    for q in range(n):
        if d == 1:
            J = _det1(F, q)
        elif d == 2:
            J = _det2(F, q)
        else:
            J = _det3(F, q)
        A1 = 0.0
        for i in range(d):
            for j in range(d):
                A1 += F[q, i, j] * F[q, i, j]
        il = 1.0 / lam[q]
        rl = dlam[q] * il
        zq = z[q]
        f1 = f10 + f11 * zq
        f2 = f20 + f21 * zq
        f3 = f30 + f31 * zq

        # first invariant
        il2 = il * il
        phi[q] += f1 * A1 * il2
        for i in range(d):
            for j in range(d):
                dF[q, i, j] += 2.0 * f1 * il2 * F[q, i, j]
        dz[q] += A1 * il2 * (f11 - 2.0 * f1 * rl)
        dzz[q] += A1 * il2 * (
            -4.0 * f11 * rl + 6.0 * f1 * rl * rl - 2.0 * f1 * d2lam[q] * il
        )

        # second invariant
        if s == 0:
            phi[q] += f2
            dz[q] += f21
        else:
            if d == 2:
                C2 = A1
            else:
                trB = 0.0
                trB2 = 0.0
                for i in range(3):
                    for j in range(3):
                        Bij = 0.0
                        for m in range(3):
                            Bij += F[q, i, m] * F[q, j, m]
                        if i == j:
                            trB += Bij
                        trB2 += Bij * Bij
                C2 = 0.5 * (trB * trB - trB2)
            ils = il**s
            phi[q] += f2 * C2 * ils
            if d == 2:
                for i in range(2):
                    for j in range(2):
                        dF[q, i, j] += f2 * ils * 2.0 * F[q, i, j]
            else:
                # d dC2/dF = 2 (tr(B) I - B) F with B = F F^T
                trB = 0.0
                B = np.empty((3, 3))
                for i in range(3):
                    for j in range(3):
                        Bij = 0.0
                        for m in range(3):
                            Bij += F[q, i, m] * F[q, j, m]
                        B[i, j] = Bij
                    trB += B[i, i]
                for i in range(3):
                    for k in range(3):
                        acc = 0.0
                        for j in range(3):
                            Wij = -B[i, j]
                            if i == j:
                                Wij += trB
                            acc += Wij * F[q, j, k]
                        dF[q, i, k] += f2 * ils * 2.0 * acc
            dz[q] += C2 * ils * (f21 - s * f2 * rl)
            dzz[q] += C2 * ils * (
                -2.0 * s * f21 * rl
                + s * (s + 1) * f2 * rl * rl
                - s * f2 * d2lam[q] * il
            )

        # volumetric term
        Je = J * il**d
        dJe = -d * Je * rl
        ddJe = d * Je * ((d + 1) * rl * rl - d2lam[q] * il)
        G = K * (Je - 1.0) ** 2
        dG = 2.0 * K * (Je - 1.0)
        phi[q] += f3 * G
        for i in range(d):
            for j in range(d):
                dF[q, i, j] += f3 * dG * il**d * cof[q, i, j]
        dz[q] += f31 * G + f3 * dG * dJe
        dzz[q] += 2.0 * f31 * dG * dJe + f3 * 2.0 * K * (
            dJe * dJe + (Je - 1.0) * ddJe
        )

        # compression barrier
        lamd = lam[q] ** d
        iJ = 1.0 / J
        phi[q] += kappa * lamd * iJ
        for i in range(d):
            for j in range(d):
                dF[q, i, j] += -kappa * lamd * iJ * iJ * cof[q, i, j]
        dz[q] += kappa * d * lamd * rl * iJ
        dzz[q] += kappa * d * lamd * ((d - 1) * rl * rl + d2lam[q] * il) * iJ

        # content energy
        phi[q] += 0.5 * hquad * zq * zq + hlin * zq
        dz[q] += hquad * zq + hlin
        dzz[q] += hquad

    return phi, dF, dz, dzz


@njit(**_JIT)
def _smoothstep(u):
    if u <= 0.0:
        return 0.0
    if u >= 1.0:
        return 1.0
    return u * u * (3.0 - 2.0 * u)


@njit(**_JIT)
def _smoothstep_prime(u):
    if u <= 0.0 or u >= 1.0:
        return 0.0
    return 6.0 * u - 6.0 * u * u


@njit(**_JIT)
def chi_cutoff(F, eps):
    n = F.shape[0]
    d = F.shape[1]
    out = np.empty(n)
    for q in range(n):
        if d == 1:
            J = _det1(F, q)
        elif d == 2:
            J = _det2(F, q)
        else:
            J = _det3(F, q)
        nrm = 0.0
        for i in range(d):
            for j in range(d):
                nrm += F[q, i, j] * F[q, i, j]
        nrm = np.sqrt(nrm)
        out[q] = _smoothstep((2.0 * J - eps) / eps) * _smoothstep(2.0 - eps * nrm)
    return out


@njit(**_JIT)
def chi_cutoff_grad(F, eps):
    n = F.shape[0]
    d = F.shape[1]
    chi = np.empty(n)
    dchi = np.empty_like(F)
    cof = np.empty_like(F)
    for q in range(n):
        _cof_into(F, q, cof)
    for q in range(n):
        if d == 1:
            J = _det1(F, q)
        elif d == 2:
            J = _det2(F, q)
        else:
            J = _det3(F, q)
        nrm = 0.0
        for i in range(d):
            for j in range(d):
                nrm += F[q, i, j] * F[q, i, j]
        nrm = np.sqrt(nrm)
        u1 = (2.0 * J - eps) / eps
        u2 = 2.0 - eps * nrm
        s1 = _smoothstep(u1)
        s2 = _smoothstep(u2)
        ds1 = _smoothstep_prime(u1)
        ds2 = _smoothstep_prime(u2)
        chi[q] = s1 * s2
        safe = nrm if nrm > 0.0 else 1.0
        for i in range(d):
            for j in range(d):
                dchi[q, i, j] = (
                    ds1 * s2 * 2.0 / eps * cof[q, i, j]
                    - s1 * ds2 * eps / safe * F[q, i, j]
                )
    return chi, dchi


@njit(**_JIT)
def yosida_batch(z, k):
    n = z.shape[0]
    out = np.empty(n)
    for q in range(n):
        if z[q] > 1.0:
            out[q] = k * (z[q] - 1.0)
        elif z[q] < 0.0:
            out[q] = k * z[q]
        else:
            out[q] = 0.0
    return out


@njit(**_JIT)
def yosida_prime(z, k):
    n = z.shape[0]
    out = np.empty(n)
    for q in range(n):
        if z[q] > 1.0 or z[q] < 0.0:
            out[q] = k
        else:
            out[q] = 0.0
    return out
