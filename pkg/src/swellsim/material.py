"""Constitutive layer: swelling law, stored energy, stresses, mobility.

The stored-energy family is volumetric-split hyperelastic with affine
softening factors,

    phi(Fe, z) = f1(z) tr(Fe Fe^T) + f2(z) tr Cof(Fe Fe^T)
               + f3(z) K (det Fe - 1)^2 + kappa / det Fe + h(z),

evaluated in total-strain form through the swelling split Fe = F / lam(z).
Derivatives are hand-coded closed forms (see ``kernels``); the test suite
holds them against central finite differences.

Also hosted here: the smooth cut-off that deactivates the energy near
degenerate states, the determinant floor, the penalty enforcing z in [0, 1],
and a sampling-based certifier for the structural assumptions the model
relies on.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels, tensor
from .errors import DegenerateState, NonPositiveStretch

__all__ = [
    "SwellingLaw",
    "OgdenEnergy",
    "Dissipation",
    "Mobility",
    "Regularization",
    "MaterialModel",
    "default_model",
    "lambda_eval",
    "phi_hat",
    "dphi_hat",
    "d2phi_hat_zz",
    "cauchy_stress",
    "chemical_potential",
    "yosida",
    "yosida_slope",
    "cutoff_chi",
    "cutoff_chi_grad",
    "det_floor",
    "viscous_stress",
    "zeta_value",
    "hyperstress",
    "mobility_hat",
    "mobility_hat_dz",
    "check_assumptions",
]


@dataclass(frozen=True)
class SwellingLaw:
    """Volumetric swelling stretch lam(z).

    families: "constant" (lam0) and "affine" (lam0 + beta*z).  Must stay
    positive on the content range actually visited; `lambda_eval` guards.
    """

    family: str = "affine"
    lam0: float = 1.0
    beta: float = 0.0

    def eval(self, z):
        """Return (lam, lam', lam'') arrays broadcast like z."""
        z = np.asarray(z, dtype=float)
        if self.family == "constant":
            lam = np.full_like(z, self.lam0)
            zero = np.zeros_like(z)
            return lam, zero, zero
        if self.family == "affine":
            lam = self.lam0 + self.beta * z
            return lam, np.full_like(z, self.beta), np.zeros_like(z)
        raise ValueError(f"unknown swelling family '{self.family}'")


@dataclass(frozen=True)
class OgdenEnergy:
    """Coefficients of the stored-energy family (units Pa).

    f_i(z) = f_i0 + f_i1*z multiply the three invariant terms;
    h(z) = hquad*z^2/2 + hlin*z.  kappa > 0 gives the 1/det coercivity
    barrier, which doubles as the uniform-convexity constant the certifier
    verifies in z.
    """

    f10: float = 1.0
    f11: float = -0.5
    f20: float = 0.0
    f21: float = 0.0
    f30: float = 1.0
    f31: float = 0.0
    K: float = 1.0
    kappa: float = 0.1
    hquad: float = 1.0
    hlin: float = 0.0

    @property
    def params(self):
        return np.array(
            [
                self.f10,
                self.f11,
                self.f20,
                self.f21,
                self.f30,
                self.f31,
                self.K,
                self.kappa,
                self.hquad,
                self.hlin,
            ]
        )


@dataclass(frozen=True)
class Dissipation:
    """Viscosity: quadratic potential eta(z)|e|^2 plus the higher-gradient
    term with coefficient nu and exponent p (> d for the analysis to hold).

    eps_bar is the declared two-sided bound constant for the potential,
    checked by the certifier: eps_bar|e|^2 <= zeta <= (1+|e|^2)/eps_bar.
    """

    eta0: float = 0.1
    eta1: float = 0.0
    nu: float = 1e-3
    p: float = 3.0
    eps_bar: float = 0.05

    def eta(self, z):
        return self.eta0 + self.eta1 * np.asarray(z, dtype=float)


@dataclass(frozen=True)
class Mobility:
    """Diffusant mobility m(Fe, z) (m^3 s / kg).

    "constant": m = m0.  "inverse_det": m = m0 / det Fe, clipped to
    [m_lo, m_hi] so the boundedness assumption holds.
    """

    family: str = "constant"
    m0: float = 1e-2
    m_lo: float = 1e-8
    m_hi: float = 1e8


@dataclass(frozen=True)
class Regularization:
    """Cut-off width eps, penalty stiffness k (Pa), and the optional
    transport regularization (coefficient eps_F, exponent r_F > 2)."""

    epsilon: float = 0.05
    yosida_k: float = 1e3
    eps_F: float = 0.0
    r_F: float = 3.0


@dataclass(frozen=True)
class MaterialModel:
    d: int = 2
    swelling: SwellingLaw = field(default_factory=SwellingLaw)
    energy: OgdenEnergy = field(default_factory=OgdenEnergy)
    dissipation: Dissipation = field(default_factory=Dissipation)
    mobility: Mobility = field(default_factory=Mobility)
    regularization: Regularization = field(default_factory=Regularization)

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ValueError("d must be 1, 2, or 3")


def default_model(d=2, **overrides):
    """The shipped default instance: affine swelling (beta=0.3), softening
    first invariant, quadratic volumetric term, compression barrier."""
    model = MaterialModel(d=d, swelling=SwellingLaw("affine", 1.0, 0.3))
    return replace(model, **overrides) if overrides else model


# ---------------------------------------------------------------------------
# pointwise constitutive evaluation


def lambda_eval(law, z):
    """Swelling stretch and its derivative at z; stretch must be positive."""
    lam, dlam, _ = law.eval(z)
    if np.any(lam <= 0.0):
        raise NonPositiveStretch(f"lam(z) <= 0 at z with min lam = {np.min(lam):.3e}")
    return lam, dlam


def _flatten_state(model, F, z):
    F = np.asarray(F, dtype=float)
    d = F.shape[-1]
    if d != model.d:
        raise ValueError(f"tensor dimension {d} != model dimension {model.d}")
    lead = F.shape[:-2]
    z = np.broadcast_to(np.asarray(z, dtype=float), lead)
    Ff = np.ascontiguousarray(F.reshape(-1, d, d))
    zf = np.ascontiguousarray(z.reshape(-1))
    return Ff, zf, lead


def _ogden_all(model, F, z, require_positive=True):
    Ff, zf, lead = _flatten_state(model, F, z)
    if require_positive and np.any(kernels.det_batch(Ff) <= 0.0):
        raise DegenerateState("det F <= 0 in constitutive evaluation")
    lam, dlam, d2lam = model.swelling.eval(zf)
    if np.any(lam <= 0.0):
        raise NonPositiveStretch("lam(z) <= 0 in constitutive evaluation")
    phi, dF, dz, dzz = kernels.ogden_eval(
        Ff, zf, lam, dlam, d2lam, model.energy.params
    )
    d = model.d
    return (
        phi.reshape(lead),
        dF.reshape(lead + (d, d)),
        dz.reshape(lead),
        dzz.reshape(lead),
    )


def phi_hat(model, F, z):
    """Stored energy density in total-strain form, phi(F/lam(z), z)."""
    return _ogden_all(model, F, z)[0]


def dphi_hat(model, F, z):
    """(d/dF, d/dz) of the total-strain stored energy; closed forms."""
    _, dF, dz, _ = _ogden_all(model, F, z)
    return dF, dz


def d2phi_hat_zz(model, F, z):
    """Second z-derivative; drives the diffusion Newton matrix."""
    return _ogden_all(model, F, z)[3]


def cauchy_stress(model, F, z):
    """Conservative stress T = phi'_F F^T + phi I (total-strain form)."""
    phi, dF, _, _ = _ogden_all(model, F, z)
    d = model.d
    T = np.einsum("...ik,...jk->...ij", dF, np.asarray(F, dtype=float))
    T += phi[..., None, None] * np.eye(d)
    return T


def yosida(z, k):
    """Penalty replacing the content constraint z in [0,1]: k(z-1)^+ - k z^-."""
    z = np.asarray(z, dtype=float)
    out = kernels.yosida_batch(np.ascontiguousarray(z.reshape(-1)), float(k))
    return out.reshape(z.shape) if z.shape else float(out[0])

def yosida_slope(z, k):
    """Selection from the (set-valued) derivative: k off [0,1], else 0."""
    z = np.asarray(z, dtype=float)
    out = kernels.yosida_prime(np.ascontiguousarray(z.reshape(-1)), float(k))
    return out.reshape(z.shape) if z.shape else float(out[0])


def cutoff_chi(F, eps):
    """Smooth cut-off in [0,1]: equals 1 where det F >= eps and |F| <= 1/eps,
    0 where det F <= eps/2 or |F| >= 2/eps, C^1 in between.

    Both factors are clamped cubic smoothsteps, S((2 det F - eps)/eps) and
    S(2 - eps|F|), which is the unique interpolation consistent with the
    stated branch values.
    """
    F = np.asarray(F, dtype=float)
    d = F.shape[-1]
    lead = F.shape[:-2]
    out = kernels.chi_cutoff(np.ascontiguousarray(F.reshape(-1, d, d)), float(eps))
    return out.reshape(lead) if lead else float(out[0])


def cutoff_chi_grad(F, eps):
    """(chi, dchi/dF); the gradient feeds the regularized stress."""
    F = np.asarray(F, dtype=float)
    d = F.shape[-1]
    lead = F.shape[:-2]
    chi, dchi = kernels.chi_cutoff_grad(
        np.ascontiguousarray(F.reshape(-1, d, d)), float(eps)
    )
    return chi.reshape(lead), dchi.reshape(lead + (d, d))


def det_floor(F, eps):
    """Floored determinant max(det F, eps); regularizes 1/det in the
    gravity force term."""
    return np.maximum(tensor.det(F), float(eps))


def chemical_potential(model, F, z, reg=None):
    """mu = chi_eps(F) * dphi/dz + penalty(z); the computable surrogate of
    the constrained chemical potential at finite stiffness k."""
    reg = model.regularization if reg is None else reg
    _, _, dz, _ = _ogden_all(model, F, z)
    chi = cutoff_chi(F, reg.epsilon)
    return chi * dz + yosida(z, reg.yosida_k)


def viscous_stress(model, z, e):
    """Strain-rate derivative of the dissipation potential: 2 eta(z) e."""
    e = np.asarray(e, dtype=float)
    return 2.0 * np.asarray(model.dissipation.eta(z))[..., None, None] * e


def zeta_value(model, z, e):
    e = np.asarray(e, dtype=float)
    return model.dissipation.eta(z) * np.einsum("...ij,...ij->...", e, e)


def hyperstress(model, grad_e):
    """Higher-gradient viscous stress nu |grad e|^(p-2) grad e.

    Continuous at grad e = 0 for p > 2 (value 0 there)."""
    ge = np.asarray(grad_e, dtype=float)
    nu, p = model.dissipation.nu, model.dissipation.p
    nrm = np.sqrt(np.einsum("...ijk,...ijk->...", ge, ge))
    if p == 2.0:
        return nu * ge
    fac = np.where(nrm > 0.0, nu * np.where(nrm > 0.0, nrm, 1.0) ** (p - 2.0), 0.0)
    return fac[..., None, None, None] * ge


def mobility_hat(model, F, z):
    """Mobility in total-strain form, m(F/lam(z), z)."""
    F = np.asarray(F, dtype=float)
    J = tensor.det(F)
    if np.any(J <= 0.0):
        raise DegenerateState("det F <= 0 in mobility evaluation")
    mob = model.mobility
    if mob.family == "constant":
        return np.broadcast_to(np.asarray(mob.m0), J.shape).copy() if J.shape else mob.m0
    if mob.family == "inverse_det":
        lam, _, _ = model.swelling.eval(z)
        Je = J / lam**model.d
        return np.clip(mob.m0 / Je, mob.m_lo, mob.m_hi)
    raise ValueError(f"unknown mobility family '{mob.family}'")


def mobility_hat_dz(model, F, z):
    """z-derivative of the total-strain mobility (0 where clipped)."""
    F = np.asarray(F, dtype=float)
    J = tensor.det(F)
    mob = model.mobility
    if mob.family == "constant":
        return np.zeros(J.shape)
    lam, dlam, _ = model.swelling.eval(z)
    Je = J / lam**model.d
    raw = mob.m0 / Je
    inside = (raw > mob.m_lo) & (raw < mob.m_hi)
    return np.where(inside, mob.m0 * model.d * lam ** (model.d - 1) * dlam / J, 0.0)


# ---------------------------------------------------------------------------
# regularized evaluation used by the implicit solves


def regularized_energy_terms(model, F, z, eps=None):
    """Cut-off-weighted energy and derivatives, total everywhere.

    Returns (chi, phi_eps, dF_eps, dz_eps, dzz_eps) where
    phi_eps = chi*phi, dF_eps = chi*dphi_dF + phi*dchi, dz_eps = chi*dphi_dz,
    dzz_eps = chi*d2phi_dzz.  Nodes with chi = 0 contribute exact zeros, so
    states past the cut-off never evaluate the (singular) energy.
    """
    eps = model.regularization.epsilon if eps is None else eps
    Ff, zf, lead = _flatten_state(model, F, z)
    d = model.d
    chi, dchi = kernels.chi_cutoff_grad(Ff, float(eps))
    n = Ff.shape[0]
    phi_e = np.zeros(n)
    dF_e = np.zeros((n, d, d))
    dz_e = np.zeros(n)
    dzz_e = np.zeros(n)
    mask = chi > 0.0
    if np.any(mask):
        lam, dlam, d2lam = model.swelling.eval(zf[mask])
        if np.any(lam <= 0.0):
            raise NonPositiveStretch("lam(z) <= 0 in regularized evaluation")
        Fm = np.ascontiguousarray(Ff[mask])
        phi, dF, dz, dzz = kernels.ogden_eval(
            Fm, zf[mask], lam, dlam, d2lam, model.energy.params
        )
        cm = chi[mask]
        phi_e[mask] = cm * phi
        dF_e[mask] = cm[:, None, None] * dF + phi[:, None, None] * dchi[mask]
        dz_e[mask] = cm * dz
        dzz_e[mask] = cm * dzz
    return (
        chi.reshape(lead),
        phi_e.reshape(lead),
        dF_e.reshape(lead + (d, d)),
        dz_e.reshape(lead),
        dzz_e.reshape(lead),
    )


def regularized_stress(model, F, z, eps=None):
    """T_eps = (chi*phi)'_F F^T + chi*phi I; equals the plain stress
    wherever the cut-off is inactive."""
    chi, phi_e, dF_e, _, _ = regularized_energy_terms(model, F, z, eps)
    d = model.d
    T = np.einsum("...ik,...jk->...ij", dF_e, np.asarray(F, dtype=float))
    T += phi_e[..., None, None] * np.eye(d)
    return T


# ---------------------------------------------------------------------------
# assumption certifier


@dataclass
class AssumptionReport:
    checks: list

    @property
    def all_passed(self):
        return all(ok for _, ok, _ in self.checks)

    def failed(self):
        return [name for name, ok, _ in self.checks if not ok]

    def __str__(self):
        lines = []
        for name, ok, detail in self.checks:
            lines.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        return "\n".join(lines)


def _sample_states(model, n, rng, det_range=(0.2, 5.0), z_range=(0.05, 0.95)):
    d = model.d
    # random rotations x log-uniform stretches, rescaled to the target det
    A = rng.normal(size=(n, d, d))
    Q1, _ = np.linalg.qr(A)
    s = np.exp(rng.uniform(-0.7, 0.7, size=(n, d)))
    F = np.einsum("nij,nj->nij", Q1, s)
    target = np.exp(rng.uniform(np.log(det_range[0]), np.log(det_range[1]), size=n))
    J = tensor.det(F)
    F *= (target / np.abs(J))[:, None, None] ** (1.0 / d)
    neg = tensor.det(F) < 0
    F[neg, 0, :] *= -1.0
    z = rng.uniform(z_range[0], z_range[1], size=n)
    return F, z


def check_assumptions(model, sample_budget=200, seed=0):
    """Sampling certifier for the structural assumptions.

    Checks: coercivity of the energy against the kappa/det barrier, the
    two-sided bounds on the viscous potential, positivity of the swelling
    stretch, positivity of the mobility, and the uniform-convexity-in-z
    second-difference inequality with constant kappa.  Failures are report
    entries, never exceptions.
    """
    rng = np.random.default_rng(seed)
    checks = []
    n = int(sample_budget)
    kappa = model.energy.kappa

    # swelling stretch positive on [0,1]
    zg = np.linspace(0.0, 1.0, 201)
    lam, _, _ = model.swelling.eval(zg)
    ok = bool(np.min(lam) > 0.0)
    checks.append(("inf lam > 0", ok, f"min lam on [0,1] = {np.min(lam):.4g}"))

    # the state-dependent checks sample z where the stretch is safely
    # positive, so a degenerate swelling law fails only its own check
    safe = zg[lam > 0.05 * max(np.max(lam), 1e-12)]
    if safe.size >= 2:
        z_lo, z_hi = float(safe[0]), float(safe[-1])
        width = z_hi - z_lo
        z_range = (z_lo + 0.05 * width, z_hi - 0.05 * width)
        F, z = _sample_states(model, n, rng, z_range=z_range)
        lamz, _, _ = model.swelling.eval(z)
        J = tensor.det(F)

        # coercivity phi >= kappa/det Fe, i.e. phi_hat >= kappa lam^d / det F
        phi = phi_hat(model, F, z)
        barrier = kappa * lamz**model.d / J
        gap = np.min(phi - barrier)
        ok = bool(gap >= -1e-10 * max(1.0, np.max(np.abs(phi))))
        checks.append(
            ("energy coercivity vs kappa/det barrier", ok, f"min margin = {gap:.4g}")
        )

        # mobility positive (and finite) over sampled states
        mhat = np.asarray(mobility_hat(model, F, z))
        ok = bool(np.min(mhat) > 0.0 and np.all(np.isfinite(mhat)))
        checks.append(("inf mobility > 0", ok, f"min sampled m = {np.min(mhat):.4g}"))

        # strong convexity in z: midpoint second-difference with constant kappa
        z0 = rng.uniform(z_range[0], z_range[1], size=n)
        z1 = rng.uniform(z_range[0], z_range[1], size=n)
        theta = rng.uniform(0.05, 0.95, size=n)
        zm = theta * z1 + (1.0 - theta) * z0
        lhs = phi_hat(model, F, zm)
        rhs = (
            theta * phi_hat(model, F, z1)
            + (1.0 - theta) * phi_hat(model, F, z0)
            - 0.5 * kappa * theta * (1.0 - theta) * (z1 - z0) ** 2
        )
        worst = np.max(lhs - rhs)
        ok = bool(worst <= 1e-10 * max(1.0, np.max(np.abs(lhs))))
        checks.append(
            (
                "uniform convexity in z (second difference)",
                ok,
                f"max violation = {worst:.4g}",
            )
        )
    else:
        detail = "not evaluable: lam <= 0 on all of [0,1]"
        checks.append(("energy coercivity vs kappa/det barrier", False, detail))
        checks.append(("inf mobility > 0", False, detail))
        checks.append(("uniform convexity in z (second difference)", False, detail))

    # two-sided viscosity bounds: eps_bar |e|^2 <= zeta <= (1+|e|^2)/eps_bar
    eb = model.dissipation.eps_bar
    zs = rng.uniform(-0.2, 1.2, size=n)
    e = rng.normal(size=(n, model.d, model.d))
    e = tensor.sym(e) * np.exp(rng.uniform(-2, 2, size=n))[:, None, None]
    ee = np.einsum("nij,nij->n", e, e)
    zeta = zeta_value(model, zs, e)
    lo = np.min(zeta - eb * ee)
    hi = np.max(zeta - (1.0 + ee) / eb)
    ok = bool(lo >= -1e-12 and hi <= 1e-12)
    checks.append(
        (
            "viscous potential bounds",
            ok,
            f"lower margin = {lo:.4g}, upper margin = {-hi:.4g}",
        )
    )

    return AssumptionReport(checks)
