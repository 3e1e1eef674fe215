import numpy as np
import pytest

from susyqm import DegenerateSampleError, NodelessViolationError
from susyqm.data_models import FdScheme
from susyqm.diffops import ScalarField, divergence, grad
from susyqm.geometry import dot, norm, random_regular_points
from susyqm.hydrogen import hydrogen_context, hydrogen_potential, hydrogen_state, sector_two_state
from susyqm.susy import ChargeContext, apply_A, apply_Adag_dot, apply_H1, apply_H2, cosine_similarity, \
    eigen_residual, free_context, proportionality_constant, superpotential_from_ground_state

NUMERIC = FdScheme(use_analytic=False)


def gaussian() -> ScalarField:
    """exp(-r^2 / 2) with closed-form derivatives."""
    return ScalarField(value=lambda x: np.exp(-0.5 * dot(x, x)), n_particles=1,
                       gradient=lambda x: -x * np.exp(-0.5 * dot(x, x))[..., np.newaxis],
                       laplacian=lambda x: (dot(x, x) - 3) * np.exp(-0.5 * dot(x, x)), name="gaussian")


@pytest.fixture
def sample(rng: np.random.Generator) -> np.ndarray:
    return random_regular_points(rng, 200, r_min=0.1, r_max=12.0)


def test_superpotential_of_hydrogen_ground_state_is_radial_unit_vector(sample: np.ndarray):
    W = superpotential_from_ground_state(hydrogen_state("1s").field)
    np.testing.assert_allclose(W(sample), sample / norm(sample)[:, np.newaxis], rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(divergence(W, sample), 2 / norm(sample), rtol=1e-10)
    W_numeric = superpotential_from_ground_state(hydrogen_state("1s").field, NUMERIC)
    np.testing.assert_allclose(W_numeric(sample), W(sample), atol=1e-8)


def test_superpotential_of_gaussian_is_position(sample: np.ndarray):
    W = superpotential_from_ground_state(gaussian())
    np.testing.assert_allclose(W(sample[:50] / 4), sample[:50] / 4, atol=1e-12)
    np.testing.assert_allclose(divergence(W, sample[:50] / 4), 3.0, atol=1e-10)


def test_superpotential_requires_nodeless_ground_state():
    W = superpotential_from_ground_state(hydrogen_state("2s").field)
    W(np.array([1.0, 0.0, 0.0]))
    with pytest.raises(NodelessViolationError):
        W(np.array([[1.0, 0.0, 0.0], [0.0, 3.0, 0.0]]))
    with pytest.raises(NodelessViolationError):
        superpotential_from_ground_state(hydrogen_state("2p_x").field)(np.array([-1.0, 0.5, 0.0]))


@pytest.mark.parametrize("path", ["analytic", "numeric"])
def test_charge_annihilates_ground_state(path: str, sample: np.ndarray):
    ctx = hydrogen_context(FdScheme.for_path(path))
    psi = hydrogen_state("1s").field
    annihilated = np.linalg.norm(apply_A(ctx, psi)(sample), axis=-1) / psi(sample)
    assert np.max(annihilated) < (1e-12 if path == "analytic" else 1e-7)


def test_charge_maps_n2_states_onto_sector_two(sample: np.ndarray):
    ctx = hydrogen_context()
    for k in ("x", "y", "z"):
        np.testing.assert_allclose(apply_A(ctx, hydrogen_state(f"2p_{k}").field)(sample),
                                   sector_two_state(f"2p_{k}").field(sample), rtol=1e-10, atol=1e-14)
    np.testing.assert_allclose(apply_A(ctx, hydrogen_state("2s").field)(sample),
                               0.5 * sector_two_state("2s").field(sample), rtol=1e-10, atol=1e-14)


def test_adjoint_charge_regenerates_sector_one_states(sample: np.ndarray):
    ctx = hydrogen_context()
    np.testing.assert_allclose(apply_Adag_dot(ctx, sector_two_state("2s").field)(sample),
                               1.5 * hydrogen_state("2s").field(sample), rtol=1e-9, atol=1e-13)
    np.testing.assert_allclose(apply_Adag_dot(ctx, sector_two_state("2p_y").field)(sample),
                               0.75 * hydrogen_state("2p_y").field(sample), rtol=1e-9, atol=1e-13)


def test_adjoint_charge_gradient_matches_finite_differences(sample: np.ndarray):
    ctx = hydrogen_context()
    g = apply_Adag_dot(ctx, sector_two_state("2p_z").field)
    assert g.gradient is not None
    scale = np.max(np.abs(g(sample)))
    np.testing.assert_allclose(grad(g, sample), grad(g, sample, NUMERIC), atol=1e-7 * scale)


@pytest.mark.parametrize("path, tolerance", [("analytic", 1e-10), ("numeric", 1e-5)])
def test_factorization_identity(path: str, tolerance: float, sample: np.ndarray):
    # 1/2 A-dagger . A f = (H1 - e0) f holds for any f, eigenstate or not.
    ctx = hydrogen_context(FdScheme.for_path(path))
    f = gaussian()
    x = sample[norm(sample) < 5]
    lhs = 0.5 * apply_Adag_dot(ctx, apply_A(ctx, f))(x)
    rhs = apply_H1(ctx, hydrogen_potential(), f)(x) - ctx.e0 * f(x)
    np.testing.assert_allclose(lhs, rhs, atol=tolerance * np.max(np.abs(f(x))))


@pytest.mark.parametrize("label", ["1s", "2s", "2p_x", "2p_z"])
def test_hydrogen_states_are_h1_eigenstates(label: str, sample: np.ndarray):
    ctx = hydrogen_context()
    state = hydrogen_state(label)
    report = eigen_residual(lambda f: apply_H1(ctx, hydrogen_potential(), f), state.field, state.energy, sample)
    assert report.passes(1e-8)
    assert report.points_tested == len(sample)


def test_wrong_energy_is_detected(sample: np.ndarray):
    ctx = hydrogen_context()
    report = eigen_residual(lambda f: apply_H1(ctx, hydrogen_potential(), f), hydrogen_state("1s").field, -0.4,
                            sample)
    assert report.max_relative_residual == pytest.approx(0.1, rel=1e-6)
    assert not report.passes(1e-2)


@pytest.mark.parametrize("path, tolerance", [("analytic", 1e-8), ("numeric", 1e-4)])
@pytest.mark.parametrize("label", ["2s", "2p_x"])
def test_sector_two_states_are_h2_eigenstates(label: str, path: str, tolerance: float, sample: np.ndarray):
    ctx = hydrogen_context(FdScheme.for_path(path))
    report = eigen_residual(lambda F: apply_H2(ctx, F), sector_two_state(label).field, -0.125, sample[:100])
    assert report.passes(tolerance)


def test_degenerate_sample_is_rejected(sample: np.ndarray):
    ctx = hydrogen_context()
    zero = ScalarField.constant(0.0, 1)
    with pytest.raises(DegenerateSampleError):
        eigen_residual(lambda f: apply_H1(ctx, hydrogen_potential(), f), zero, -0.5, sample)


def test_hydrogen_superpotential_is_a_gradient_field(sample: np.ndarray):
    assert hydrogen_context().gradient_field_asymmetry(sample) < 1e-12
    assert hydrogen_context(NUMERIC).gradient_field_asymmetry(sample) < 1e-7


def test_free_context_charge_is_the_gradient(sample: np.ndarray):
    ctx = free_context(1)
    psi = hydrogen_state("2p_x").field
    np.testing.assert_array_equal(apply_A(ctx, psi)(sample), grad(psi, sample))
    assert isinstance(ctx, ChargeContext) and ctx.e0 == 0.0


def test_context_is_read_only():
    ctx = hydrogen_context()
    with pytest.raises(AttributeError):
        ctx.e0 = 1.0
    assert ctx.with_scheme(NUMERIC).scheme.use_analytic is False
    assert ctx.scheme.use_analytic is True


def test_cosine_similarity_and_proportionality():
    a = np.array([1.0, 2.0, -3.0])
    assert cosine_similarity(a, 2 * a) == pytest.approx(1.0)
    assert cosine_similarity(a, -a) == pytest.approx(-1.0)
    assert cosine_similarity(a, np.zeros(3)) == 0.0
    assert proportionality_constant(3 * a, a) == pytest.approx(3.0)
