import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from susyqm import ExcludedPointError
from susyqm.data_models import FdScheme, PadeJastrowParams
from susyqm.diffops import ScalarField, divergence, grad, jacobian, laplacian
from susyqm.geometry import exchange_12, random_regular_points
from susyqm.helium import QUOTED_ALPHA, QUOTED_PADE_JASTROW_ENERGY, cusp_slopes, helium_context, helium_potential, \
    helium_superpotential, hydrogenic_product, independent_electron_context, jastrow_derivatives, jastrow_exponent, \
    local_energies, local_energy, pade_jastrow
from susyqm.susy import apply_A, superpotential_from_ground_state

NUMERIC = FdScheme(use_analytic=False)
PARAMS = PadeJastrowParams(alpha=QUOTED_ALPHA)
coordinate = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False, allow_infinity=False)


@pytest.fixture
def sample(rng: np.random.Generator) -> np.ndarray:
    return random_regular_points(rng, 200, n_particles=2, r_min=0.1, r_max=6.0, min_pair_distance=0.1)


def exponent_oracle(x: np.ndarray, params: PadeJastrowParams):
    """u, grad u and lap u written out per particle, independent of the field algebra."""
    p1, p2 = x[..., :3], x[..., 3:]
    r1, r2 = np.linalg.norm(p1, axis=-1), np.linalg.norm(p2, axis=-1)
    s = np.linalg.norm(p1 - p2, axis=-1)
    z, c, a = params.z_eff, params.jastrow_coeff, params.alpha
    u = -z * r1 - z * r2 + c * s / (1 + a * s)
    j1 = c / (1 + a * s) ** 2
    j2 = -2 * c * a / (1 + a * s) ** 3
    g1 = -z * p1 / r1[..., None] + j1[..., None] * (p1 - p2) / s[..., None]
    g2 = -z * p2 / r2[..., None] - j1[..., None] * (p1 - p2) / s[..., None]
    # J(r12) picks up J'' + 2 J' / r12 from each particle's block
    lap = -2 * z / r1 - 2 * z / r2 + 2 * (j2 + 2 * j1 / s)
    return u, np.concatenate([g1, g2], axis=-1), lap


def test_exponent_value_at_opposite_points():
    x = np.array([1.0, 0.0, 0.0, -1.0, 0.0, 0.0])
    assert jastrow_exponent(PARAMS)(x) == pytest.approx(-3.4138, abs=1e-4)


@pytest.mark.parametrize("alpha", [0.1, QUOTED_ALPHA, 1.0])
def test_exponent_matches_oracle(alpha: float, sample: np.ndarray):
    params = PadeJastrowParams(alpha=alpha)
    u, g, lap = exponent_oracle(sample, params)
    f = jastrow_exponent(params)
    np.testing.assert_allclose(f(sample), u, rtol=1e-12)
    np.testing.assert_allclose(grad(f, sample), g, atol=1e-10)
    np.testing.assert_allclose(grad(f, sample, NUMERIC), g, atol=1e-6)
    np.testing.assert_allclose(laplacian(f, sample), lap, rtol=1e-10, atol=1e-9)
    np.testing.assert_allclose(laplacian(f, sample, NUMERIC), lap, atol=5e-4)


@pytest.mark.parametrize("alpha", [0.1, QUOTED_ALPHA, 1.0])
def test_trial_state_laplacian_matches_oracle(alpha: float, sample: np.ndarray):
    params = PadeJastrowParams(alpha=alpha)
    u, g, lap = exponent_oracle(sample, params)
    psi = pade_jastrow(params)
    expected = np.exp(u) * (lap + np.sum(g * g, axis=-1))
    np.testing.assert_allclose(laplacian(psi, sample), expected, rtol=1e-9, atol=1e-12 * np.max(np.exp(u)))


def test_jastrow_derivatives_match_finite_differences():
    s = np.linspace(0.1, 10.0, 50)
    h = 1e-5
    values = jastrow_derivatives(s, PARAMS)
    for order in range(1, 4):
        fd = (jastrow_derivatives(s + h, PARAMS)[order - 1] - jastrow_derivatives(s - h, PARAMS)[order - 1]) / (2 * h)
        np.testing.assert_allclose(values[order], fd, rtol=1e-6, atol=1e-9)


@given(arrays(np.float64, (6,), elements=coordinate))
@settings(max_examples=50, deadline=None)
def test_trial_state_is_exchange_symmetric(x: np.ndarray):
    psi = pade_jastrow(PARAMS)
    np.testing.assert_allclose(psi(exchange_12(x)), psi(x), rtol=1e-15)
    assert psi(x) > 0


def test_superpotential_is_minus_log_gradient_of_trial_state(sample: np.ndarray):
    W = helium_superpotential(PARAMS)
    reference = superpotential_from_ground_state(pade_jastrow(PARAMS))
    np.testing.assert_allclose(W(sample), reference(sample), rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(divergence(W, sample), divergence(reference, sample), rtol=1e-9, atol=1e-9)


def test_superpotential_jacobian(sample: np.ndarray):
    W = helium_superpotential(PARAMS)
    J = jacobian(W, sample)
    assert np.max(np.abs(J - np.swapaxes(J, -1, -2))) < 1e-12
    np.testing.assert_allclose(J, jacobian(W, sample, NUMERIC), atol=1e-6)
    np.testing.assert_allclose(np.trace(J, axis1=-2, axis2=-1), divergence(W, sample), rtol=1e-12, atol=1e-12)
    assert helium_context(PARAMS, scheme=NUMERIC).gradient_field_asymmetry(sample[:50]) < 1e-6


def test_superpotential_gradient_of_divergence(sample: np.ndarray):
    W = helium_superpotential(PARAMS)
    div_field = ScalarField(value=W.divergence, n_particles=2, singular=W.singular)
    np.testing.assert_allclose(W.grad_divergence(sample), grad(div_field, sample, NUMERIC), rtol=1e-6, atol=1e-6)


def test_superpotential_is_exchange_covariant(sample: np.ndarray):
    W = helium_superpotential(PARAMS)
    np.testing.assert_allclose(W.exchanged()(sample), W(sample), rtol=1e-13, atol=1e-13)


def test_far_separated_electrons_decouple():
    W = helium_superpotential(PARAMS)
    x = np.array([500.0, 0.0, 0.0, 0.0, -500.0, 0.0])
    w = W(x)
    assert np.linalg.norm(w[:3]) == pytest.approx(2.0, abs=1e-5)
    assert np.linalg.norm(w[3:]) == pytest.approx(2.0, abs=1e-5)


def test_context_charge_annihilates_trial_state(sample: np.ndarray):
    ctx = helium_context(PARAMS)
    psi = pade_jastrow(PARAMS)
    relative = np.linalg.norm(apply_A(ctx, psi)(sample), axis=-1) / psi(sample)
    assert np.max(relative) < 1e-12
    assert ctx.e0 == QUOTED_PADE_JASTROW_ENERGY == -2.878
    assert independent_electron_context().e0 == -4.0


def test_local_energy_of_independent_electrons(sample: np.ndarray):
    psi = hydrogenic_product()
    energies, excluded = local_energies(psi, helium_potential(include_repulsion=False), sample)
    assert not np.any(excluded)
    np.testing.assert_allclose(energies, -4.0, rtol=1e-10)
    s = np.linalg.norm(sample[:, :3] - sample[:, 3:], axis=-1)
    energies, _ = local_energies(psi, helium_potential(), sample)
    np.testing.assert_allclose(energies, -4.0 + 1 / s, rtol=1e-10, atol=1e-10)


def test_local_energy_paths_agree(sample: np.ndarray):
    psi = pade_jastrow(PARAMS)
    analytic, _ = local_energies(psi, helium_potential(), sample)
    numeric, excluded = local_energies(psi, helium_potential(), sample, NUMERIC)
    assert not np.any(excluded)
    np.testing.assert_allclose(analytic, numeric, atol=1e-4)


@pytest.mark.parametrize("x", [
    [0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
    [0.5, 0.5, 0.5, 0.5, 0.5, 0.5],
])
def test_local_energy_is_undefined_at_singular_points(x):
    with pytest.raises(ExcludedPointError):
        local_energy(pade_jastrow(PARAMS), x)


def test_local_energies_mask_singular_points():
    x = np.array([[0.0, 0.0, 0.0, 1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0, 1.0, 0.0]])
    energies, excluded = local_energies(pade_jastrow(PARAMS), helium_potential(), x)
    assert excluded.tolist() == [True, False]
    assert np.isnan(energies[0]) and np.isfinite(energies[1])
    assert local_energy(pade_jastrow(PARAMS), x[1]) == pytest.approx(energies[1])


@pytest.mark.parametrize("coeff", [0.5, 0.3])
def test_cusp_slopes(coeff: float):
    slopes = cusp_slopes(PadeJastrowParams(alpha=QUOTED_ALPHA, jastrow_coeff=coeff))
    assert slopes["electron_electron"] == pytest.approx(coeff, abs=1e-3)
    assert slopes["electron_nucleus"] == pytest.approx(-2.0, abs=1e-3)
