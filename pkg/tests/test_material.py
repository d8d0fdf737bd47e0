import numpy as np
import pytest

from swellsim import material as mat
from swellsim import tensor
from swellsim.errors import DegenerateState, NonPositiveStretch
from swellsim.material import (
    Dissipation,
    MaterialModel,
    Mobility,
    OgdenEnergy,
    Regularization,
    SwellingLaw,
    default_model,
)
from tests.conftest import random_states


def phi_oracle(model, F, z):
    """Independent stored-energy evaluation: build Fe = F/lam and apply the
    family term by term with numpy linalg (no shared code with the package
    beyond the coefficient values)."""
    en = model.energy
    lam = {
        "constant": lambda s: model.swelling.lam0 + 0 * s,
        "affine": lambda s: model.swelling.lam0 + model.swelling.beta * s,
    }[model.swelling.family](z)
    Fe = np.asarray(F, dtype=float) / lam
    B = Fe @ Fe.T
    d = model.d
    trcof = {1: 1.0, 2: np.trace(B), 3: 0.5 * (np.trace(B) ** 2 - np.trace(B @ B))}[d]
    Je = np.linalg.det(Fe)
    return (
        (en.f10 + en.f11 * z) * np.trace(B)
        + (en.f20 + en.f21 * z) * trcof
        + (en.f30 + en.f31 * z) * en.K * (Je - 1.0) ** 2
        + en.kappa / Je
        + 0.5 * en.hquad * z**2
        + en.hlin * z
    )


def kappa_only(d=2, beta=0.3, kappa=0.7):
    return MaterialModel(
        d=d,
        swelling=SwellingLaw("affine", 1.0, beta),
        energy=OgdenEnergy(f10=0, f11=0, f30=0, K=0, kappa=kappa, hquad=0),
    )


def h_only(d=2, hquad=2.0, hlin=0.3):
    return MaterialModel(
        d=d,
        swelling=SwellingLaw("constant", 1.0),
        energy=OgdenEnergy(f10=0, f11=0, f30=0, K=0, kappa=0, hquad=hquad, hlin=hlin),
    )


# ---------------------------------------------------------------------------
# swelling law


def test_lambda_eval_constant_and_affine():
    lam, dlam = mat.lambda_eval(SwellingLaw("constant", 1.0), 0.37)
    assert lam == 1.0 and dlam == 0.0
    lam, dlam = mat.lambda_eval(SwellingLaw("affine", 1.0, 0.3), 0.0)
    assert lam == 1.0 and dlam == pytest.approx(0.3)


def test_lambda_eval_fd(rng):
    law = SwellingLaw("affine", 1.1, 0.25)
    z = rng.uniform(0, 1, size=40)
    h = 1e-6
    lam, dlam = mat.lambda_eval(law, z)
    fd = (law.eval(z + h)[0] - law.eval(z - h)[0]) / (2 * h)
    assert np.allclose(dlam, fd, rtol=1e-8)


def test_lambda_eval_raises_on_nonpositive():
    with pytest.raises(NonPositiveStretch):
        mat.lambda_eval(SwellingLaw("affine", 1.0, -2.0), 0.6)


# ---------------------------------------------------------------------------
# stored energy and derivatives


def test_phi_hat_identity_swelling_equals_direct(rng):
    model = default_model(swelling=SwellingLaw("constant", 1.0))
    F, z = random_states(rng, 30)
    got = mat.phi_hat(model, F, z)
    want = [phi_oracle(model, F[i], z[i]) for i in range(30)]
    assert np.allclose(got, want, rtol=1e-12)


def test_phi_hat_kappa_family_closed_form(rng):
    # for phi = kappa/det Fe the total-strain energy is kappa lam^d / det F
    model = kappa_only(kappa=0.7)
    F, z = random_states(rng, 25)
    lam = 1.0 + 0.3 * z
    want = 0.7 * lam**2 / np.linalg.det(F)
    assert np.allclose(mat.phi_hat(model, F, z), want, rtol=1e-12)


def test_phi_hat_at_identity():
    model = default_model(swelling=SwellingLaw("constant", 1.0))
    en = model.energy
    z = 0.4
    d = 2
    want = (
        (en.f10 + en.f11 * z) * d
        + (en.f20 + en.f21 * z) * d
        + (en.f30 + en.f31 * z) * en.K * 0.0
        + en.kappa
        + 0.5 * en.hquad * z**2
    )
    assert mat.phi_hat(model, np.eye(2), z) == pytest.approx(want, rel=1e-14)


def test_phi_hat_degenerate_raises():
    model = default_model()
    with pytest.raises(DegenerateState):
        mat.phi_hat(model, np.diag([1.0, -0.5]), 0.4)


def test_dphi_hat_h_only():
    model = h_only(hquad=2.0, hlin=0.3)
    F = np.array([[1.2, 0.1], [0.0, 0.9]])
    dF, dz = mat.dphi_hat(model, F, 0.25)
    assert np.allclose(dF, 0.0)
    assert dz == pytest.approx(2.0 * 0.25 + 0.3, rel=1e-14)


def test_dphi_hat_kappa_family_symbolic(rng):
    # d_F = -kappa lam^d / det F * F^{-T};  d_z = kappa d lam^{d-1} lam' / det F
    model = kappa_only(kappa=0.7, beta=0.3)
    F, z = random_states(rng, 20)
    lam = 1.0 + 0.3 * z
    J = np.linalg.det(F)
    dF, dz = mat.dphi_hat(model, F, z)
    want_dF = -(0.7 * lam**2 / J)[:, None, None] * np.linalg.inv(F).swapaxes(-1, -2)
    want_dz = 0.7 * 2 * lam * 0.3 / J
    assert np.allclose(dF, want_dF, rtol=1e-10)
    assert np.allclose(dz, want_dz, rtol=1e-10)


def fd_gradients(model, F, z, h=1e-6):
    """Central finite-difference oracle for both derivatives of phi_hat."""
    d = model.d
    dF = np.zeros((d, d))
    for i in range(d):
        for j in range(d):
            E = np.zeros((d, d))
            E[i, j] = h
            dF[i, j] = (
                mat.phi_hat(model, F + E, z) - mat.phi_hat(model, F - E, z)
            ) / (2 * h)
    dz = (mat.phi_hat(model, F, z + h) - mat.phi_hat(model, F, z - h)) / (2 * h)
    return dF, dz


@pytest.mark.parametrize("d", [2, 3])
def test_gradient_consistency_vs_fd(rng, d):
    # analytic derivatives vs central differences, rel <= 1e-5, 100 states
    model = default_model(
        d=d, energy=OgdenEnergy(f20=0.2, f21=-0.1, f31=-0.2, hlin=0.1)
    )
    F, z = random_states(rng, 100, d=d)
    dF, dz = mat.dphi_hat(model, F, z)
    for i in range(100):
        fdF, fdz = fd_gradients(model, F[i], z[i])
        scale = max(np.max(np.abs(fdF)), abs(fdz), 1e-8)
        assert np.max(np.abs(dF[i] - fdF)) <= 1e-5 * scale
        assert abs(dz[i] - fdz) <= 1e-5 * scale


def test_second_derivative_zz_vs_fd(rng):
    model = default_model(energy=OgdenEnergy(f21=-0.05, f31=-0.1, hlin=0.2))
    F, z = random_states(rng, 50)
    dzz = mat.d2phi_hat_zz(model, F, z)
    h = 1e-5
    fd = (
        mat.phi_hat(model, F, z + h)
        - 2 * mat.phi_hat(model, F, z)
        + mat.phi_hat(model, F, z - h)
    ) / h**2
    assert np.allclose(dzz, fd, rtol=2e-4, atol=1e-6)


# ---------------------------------------------------------------------------
# stress


def test_cauchy_stress_null_family(rng):
    # phi = kappa/det Fe gives identically zero stress
    model = kappa_only(kappa=0.7)
    F, z = random_states(rng, 100)
    T = mat.cauchy_stress(model, F, z)
    bound = 1e-10 * 0.7 / np.linalg.det(F)
    assert np.all(tensor.frobenius(T) <= bound)


def test_cauchy_stress_trace_energy():
    # phi = (mu/2)|Fe|^2, lam = 1  ->  T = mu F F^T + (mu/2)|F|^2 I
    mu = 0.8
    model = MaterialModel(
        d=2,
        swelling=SwellingLaw("constant", 1.0),
        energy=OgdenEnergy(f10=mu / 2, f11=0, f30=0, K=0, kappa=0, hquad=0),
    )
    F = np.array([[1.3, 0.4], [-0.2, 0.9]])
    want = mu * F @ F.T + 0.5 * mu * np.sum(F * F) * np.eye(2)
    assert np.allclose(mat.cauchy_stress(model, F, 0.3), want, rtol=1e-12)


def test_cauchy_stress_z_only_is_pressure():
    model = h_only(hquad=2.0, hlin=0.0)
    F = np.array([[1.5, 0.2], [0.1, 0.7]])
    T = mat.cauchy_stress(model, F, 0.6)
    assert np.allclose(T, mat.phi_hat(model, F, 0.6) * np.eye(2), rtol=1e-14)


def test_stress_identity(rng):
    # T = dphi_dF F^T + phi I with the same derivative code path
    model = default_model()
    F, z = random_states(rng, 40)
    T = mat.cauchy_stress(model, F, z)
    phi = mat.phi_hat(model, F, z)
    dF, _ = mat.dphi_hat(model, F, z)
    want = np.einsum("nik,njk->nij", dF, F) + phi[:, None, None] * np.eye(2)
    assert np.allclose(T, want, rtol=1e-12, atol=1e-13)


# ---------------------------------------------------------------------------
# penalty, cut-off, floor


def test_yosida_branch_values():
    assert mat.yosida(0.5, 100.0) == 0.0
    assert mat.yosida(1.2, 10.0) == pytest.approx(2.0, rel=1e-14)
    assert mat.yosida(0.0, 50.0) == 0.0
    assert mat.yosida(1.0, 50.0) == 0.0
    assert mat.yosida(-0.1, 100.0) == pytest.approx(-10.0, rel=1e-14)


def test_yosida_monotone_and_zero_on_unit_interval(rng):
    z = np.sort(rng.uniform(-2, 3, size=300))
    v = mat.yosida(z, 37.0)
    assert np.all(np.diff(v) >= 0.0)
    inside = (z >= 0) & (z <= 1)
    assert np.all(v[inside] == 0.0)


def test_cutoff_branch_values():
    assert mat.cutoff_chi(np.eye(2), 0.1) == 1.0
    assert mat.cutoff_chi(np.diag([0.2, 0.2]), 0.1) == 0.0  # det = 0.04 <= eps/2
    # mid-branch: det = 0.075 -> S(0.5) = 0.5, norm factor saturated at 1
    assert mat.cutoff_chi(np.diag([0.3, 0.25]), 0.1) == pytest.approx(0.5, abs=1e-14)
    big = 25.0 * np.eye(2)  # |F| > 2/eps
    assert mat.cutoff_chi(big, 0.1) == 0.0


def test_cutoff_range_and_c1(rng):
    eps = 0.1
    F = rng.normal(size=(300, 2, 2)) * 0.8 + np.eye(2)
    chi = mat.cutoff_chi(F, eps)
    assert np.all((chi >= 0.0) & (chi <= 1.0))
    # directional derivative continuity across the branch interfaces
    h = 1e-8
    cases = [
        (np.diag([1.0, 0.1]), np.diag([0.0, 1.0])),  # det F = eps interface
        (np.diag([0.05, 1.0]), np.diag([1.0, 0.0])),  # det F = eps/2 interface
        (np.eye(2) * 10.0 / np.sqrt(2.0), np.eye(2)),  # |F| = 1/eps interface
    ]
    for base, direction in cases:

        def chi_at(t):
            return mat.cutoff_chi(base + t * direction, eps)

        left = (chi_at(0.0) - chi_at(-h)) / h
        right = (chi_at(h) - chi_at(0.0)) / h
        assert abs(left - right) <= 1e-4


def test_cutoff_gradient_vs_fd(rng):
    eps = 0.15
    F = rng.normal(size=(20, 2, 2)) * 0.1 + np.diag([0.35, 0.45])
    chi, dchi = mat.cutoff_chi_grad(F, eps)
    h = 1e-7
    for n in range(20):
        for i in range(2):
            for j in range(2):
                E = np.zeros((2, 2))
                E[i, j] = h
                fd = (
                    mat.cutoff_chi(F[n] + E, eps) - mat.cutoff_chi(F[n] - E, eps)
                ) / (2 * h)
                assert dchi[n, i, j] == pytest.approx(fd, rel=5e-6, abs=1e-7)


def test_det_floor():
    assert mat.det_floor(np.diag([2.0, 1.0]), 0.01) == 2.0
    assert mat.det_floor(np.diag([1.0, -0.5]), 0.01) == 0.01
    F = np.diag([0.25, 0.25])  # det exactly eps (binary-exact)
    assert mat.det_floor(F, 0.0625) == 0.0625


def test_chemical_potential_cases():
    model = h_only(hquad=2.0, hlin=0.0)
    # penalty inactive inside (0,1): mu = h'(z)
    assert mat.chemical_potential(model, np.eye(2), 0.5) == pytest.approx(1.0)
    # penalty branches with z-independent energy
    model0 = h_only(hquad=0.0, hlin=0.0)
    reg = Regularization(epsilon=0.05, yosida_k=100.0)
    assert mat.chemical_potential(model0, np.eye(2), 1.05, reg) == pytest.approx(5.0)
    assert mat.chemical_potential(model0, np.eye(2), -0.1, reg) == pytest.approx(-10.0)


def test_chemical_potential_reduces_to_dz(rng):
    model = default_model()
    F, z = random_states(rng, 30, det_range=(0.5, 2.0))
    mu = mat.chemical_potential(model, F, z)
    _, dz = mat.dphi_hat(model, F, z)
    assert np.array_equal(mu, dz)  # chi = 1 and penalty = 0 exactly


# ---------------------------------------------------------------------------
# viscosity, hyperstress, mobility


def test_viscous_stress_quadratic(rng):
    model = default_model(dissipation=Dissipation(eta0=0.4))
    assert np.allclose(mat.viscous_stress(model, 0.3, np.zeros((2, 2))), 0.0)
    e = tensor.sym(rng.normal(size=(5, 2, 2)))
    assert np.allclose(mat.viscous_stress(model, 0.3, e), 0.8 * e, rtol=1e-14)


def test_viscous_stress_monotone(rng):
    model = default_model(dissipation=Dissipation(eta0=0.2, eta1=0.1))
    for _ in range(50):
        e1 = tensor.sym(rng.normal(size=(2, 2)))
        e2 = tensor.sym(rng.normal(size=(2, 2)))
        gap = np.sum(
            (mat.viscous_stress(model, 0.5, e1) - mat.viscous_stress(model, 0.5, e2))
            * (e1 - e2)
        )
        assert gap >= 0.0


def test_hyperstress_cases(rng):
    model = default_model(dissipation=Dissipation(nu=0.7, p=3.0))
    assert np.allclose(mat.hyperstress(model, np.zeros((2, 2, 2))), 0.0)
    ge = rng.normal(size=(2, 2, 2))
    ge_unit = ge / np.sqrt(np.sum(ge * ge))
    model1 = default_model(dissipation=Dissipation(nu=1.0, p=3.0))
    assert np.allclose(mat.hyperstress(model1, ge_unit), ge_unit, rtol=1e-12)
    model2 = default_model(dissipation=Dissipation(nu=0.7, p=2.0))
    assert np.allclose(mat.hyperstress(model2, ge), 0.7 * ge, rtol=1e-14)
    # norm relation |h| = nu |ge|^(p-1)
    got = mat.hyperstress(model, ge)
    nrm = np.sqrt(np.sum(ge * ge))
    assert np.sqrt(np.sum(got * got)) == pytest.approx(0.7 * nrm**2, rel=1e-12)


def test_mobility_hat(rng):
    model = default_model(mobility=Mobility("constant", m0=0.02))
    F, z = random_states(rng, 10)
    assert np.allclose(mat.mobility_hat(model, F, z), 0.02)
    model_inv = default_model(mobility=Mobility("inverse_det", m0=0.02))
    lam = 1.0 + 0.3 * z
    want = 0.02 * lam**2 / np.linalg.det(F)
    assert np.allclose(mat.mobility_hat(model_inv, F, z), want, rtol=1e-12)
    model_id = default_model(
        swelling=SwellingLaw("constant", 1.0),
        mobility=Mobility("inverse_det", m0=0.02),
    )
    assert np.allclose(
        mat.mobility_hat(model_id, F, z), 0.02 / np.linalg.det(F), rtol=1e-12
    )


# ---------------------------------------------------------------------------
# assumption certifier


def test_default_model_passes_all_checks():
    report = mat.check_assumptions(default_model(), sample_budget=300)
    assert report.all_passed, str(report)


def test_counterexample_lambda_fails_only_stretch():
    model = default_model(swelling=SwellingLaw("affine", 1.0, -2.0))
    report = mat.check_assumptions(model, sample_budget=200)
    assert report.failed() == ["inf lam > 0"], str(report)


def test_counterexample_weak_viscosity_fails_only_bounds():
    model = default_model(dissipation=Dissipation(eta0=0.01, eps_bar=0.05))
    report = mat.check_assumptions(model, sample_budget=200)
    assert report.failed() == ["viscous potential bounds"], str(report)


def test_counterexample_stiffening_fails_only_convexity():
    model = default_model(energy=OgdenEnergy(f10=1.0, f11=1.0, hquad=0.02))
    report = mat.check_assumptions(model, sample_budget=300)
    assert report.failed() == ["uniform convexity in z (second difference)"], str(
        report
    )
