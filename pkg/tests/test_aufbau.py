import numpy as np
import pytest

from susyqm import AufbauKind
from susyqm.aufbau import ALPHA_NORM, BETA_NORM, alpha_1s, attach_correlation, aufbau_context, aufbau_sample, \
    beta_2s, building_block, combine, compare_with_reference_block, correlation_factor, exchange_defect, \
    exchanged_block, orbital_product, regeneration_check, regeneration_target
from susyqm.data_models import FdScheme, PadeJastrowParams
from susyqm.diffops import grad, laplacian
from susyqm.geometry import exchange_12
from susyqm.helium import QUOTED_ALPHA

NUMERIC = FdScheme(use_analytic=False)
PARAMS = PadeJastrowParams(alpha=QUOTED_ALPHA)


@pytest.fixture(scope="module")
def sample() -> np.ndarray:
    return aufbau_sample(300, seed=1)


def test_orbital_product_values():
    product = orbital_product(alpha_1s(), beta_2s())
    assert product(np.zeros(6)) == pytest.approx(1 / (4 * np.sqrt(2) * np.pi), rel=1e-14)
    assert ALPHA_NORM * BETA_NORM == pytest.approx(1 / (4 * np.sqrt(2) * np.pi), rel=1e-14)
    on_node = np.array([[0.3, -0.2, 0.5, 0.0, 1.0, 0.0], [1.0, 1.0, 1.0, 0.6, 0.0, 0.8]])
    np.testing.assert_allclose(product(on_node), [0.0, 0.0], atol=1e-15)


def test_orbital_product_derivatives(sample: np.ndarray):
    product = orbital_product(alpha_1s(), beta_2s())
    scale = np.max(np.abs(product(sample)))
    np.testing.assert_allclose(grad(product, sample), grad(product, sample, NUMERIC), atol=1e-8 * scale)
    np.testing.assert_allclose(laplacian(product, sample), laplacian(product, sample, NUMERIC), atol=1e-5 * scale)


def test_unknown_context_is_rejected():
    with pytest.raises(ValueError):
        aufbau_context("bogus")
    assert aufbau_context("bare").e0 == -4.0
    assert aufbau_context("none").e0 == 0.0


def test_free_building_block_vanishes_on_beta_node():
    block = building_block(aufbau_context("none"), alpha_1s(), beta_2s())
    x = np.array([0.4, 0.1, -0.3, 0.0, 1.0, 0.0])
    np.testing.assert_array_equal(block.field(x)[:3], np.zeros(3))
    assert np.linalg.norm(block.field(x)[3:]) > 0


@pytest.mark.parametrize("context", ["pj", "bare", "none"])
def test_building_block_has_no_exchange_symmetry(context: str, sample: np.ndarray):
    block = building_block(aufbau_context(context), alpha_1s(), beta_2s())
    assert block.kind is AufbauKind.BUILDING_BLOCK
    assert block.exchange_sign == 0
    phi = block.field(sample)
    swapped = exchanged_block(block).field(sample)
    scale = np.max(np.abs(phi))
    assert np.max(np.abs(swapped - phi)) > 1e-3 * scale
    assert np.max(np.abs(swapped + phi)) > 1e-3 * scale


def test_exchanged_block_definition(sample: np.ndarray):
    block = building_block(aufbau_context("pj"), alpha_1s(), beta_2s())
    swapped = exchanged_block(block)
    assert swapped.kind is AufbauKind.EXCHANGED_BLOCK
    np.testing.assert_array_equal(swapped.field(sample), exchange_12(block.field(exchange_12(sample))))
    with pytest.raises(ValueError):
        exchanged_block(swapped)


@pytest.mark.parametrize("context", ["pj", "bare", "none"])
@pytest.mark.parametrize("mode, sign", [("triplet", -1), ("singlet", 1)])
def test_combinations_have_exact_exchange_symmetry(context: str, mode: str, sign: int, sample: np.ndarray):
    state = combine(building_block(aufbau_context(context), alpha_1s(), beta_2s()), mode)
    assert state.exchange_sign == sign
    np.testing.assert_array_equal(state.field.exchanged()(sample), sign * state.field(sample))
    assert exchange_defect(state, sample) == 0.0
    correlated = attach_correlation(state, PARAMS)
    assert correlated.exchange_sign == sign
    assert exchange_defect(correlated, sample) == 0.0


@pytest.mark.parametrize("context", ["pj", "bare"])
def test_pauli_exclusion_for_identical_orbitals(context: str, sample: np.ndarray):
    triplet = combine(building_block(aufbau_context(context), alpha_1s(), alpha_1s()), "triplet")
    np.testing.assert_array_equal(triplet.field(sample), np.zeros_like(sample))


def test_correlation_multiplies_by_jastrow_factor(sample: np.ndarray):
    triplet = combine(building_block(aufbau_context("pj"), alpha_1s(), beta_2s()), "triplet")
    correlated = attach_correlation(triplet, PARAMS)
    assert correlated.kind is AufbauKind.CORRELATED_TRIPLET
    s = np.linalg.norm(sample[:, :3] - sample[:, 3:], axis=-1)
    factor = np.exp(0.5 * s / (1 + QUOTED_ALPHA * s))
    np.testing.assert_allclose(correlation_factor(PARAMS)(sample), factor, rtol=1e-14)
    np.testing.assert_allclose(correlated.field(sample), triplet.field(sample) * factor[:, np.newaxis], rtol=1e-13,
                               atol=1e-300)


def test_correlation_vanishes_for_large_delta(sample: np.ndarray):
    singlet = combine(building_block(aufbau_context("bare"), alpha_1s(), beta_2s()), "singlet")
    weak = attach_correlation(singlet, PadeJastrowParams(alpha=1e6))
    np.testing.assert_allclose(weak.field(sample), singlet.field(sample), rtol=1e-6)


def test_wrong_kinds_are_rejected():
    block = building_block(aufbau_context("none"), alpha_1s(), beta_2s())
    triplet = combine(block, "triplet")
    with pytest.raises(ValueError):
        combine(triplet, "singlet")
    with pytest.raises(ValueError):
        combine(block, "building_block")
    with pytest.raises(ValueError):
        combine(block, "quintet")
    with pytest.raises(ValueError):
        attach_correlation(block, PARAMS)
    with pytest.raises(ValueError):
        attach_correlation(attach_correlation(triplet, PARAMS), PARAMS)
    with pytest.raises(ValueError):
        exchange_defect(block, aufbau_sample(10))
    with pytest.raises(ValueError):
        regeneration_target(block)


@pytest.mark.parametrize("mode", ["triplet", "singlet"])
def test_regeneration_in_independent_electron_context(mode: str, sample: np.ndarray):
    # alpha(r1) beta(r2) is a Z = 2 product eigenstate at -2.5, so A-dagger . A gives 2 (-2.5 + 4) = 3 times it
    ctx = aufbau_context("bare")
    state = combine(building_block(ctx, alpha_1s(), beta_2s()), mode)
    report = regeneration_check(ctx, state, sample)
    assert report.cosine_similarity >= 1 - 1e-6
    assert report.proportionality == pytest.approx(3.0, rel=1e-6)
    assert report.points_tested == len(sample)


def test_regeneration_target_symmetry(sample: np.ndarray):
    block = building_block(aufbau_context("pj"), alpha_1s(), beta_2s())
    for mode, sign in (("triplet", -1), ("singlet", 1)):
        target = regeneration_target(combine(block, mode))
        np.testing.assert_array_equal(target(exchange_12(sample)), sign * target(sample))


@pytest.mark.parametrize("context", ["pj", "none"])
def test_regeneration_reports_are_similarities(context: str, sample: np.ndarray):
    ctx = aufbau_context(context)
    state = attach_correlation(combine(building_block(ctx, alpha_1s(), beta_2s()), "singlet"), PARAMS)
    report = regeneration_check(ctx, state, sample)
    assert -1.0 <= report.cosine_similarity <= 1.0 + 1e-12
    assert report.kind is AufbauKind.CORRELATED_SINGLET


def test_reference_block_comparison(sample: np.ndarray):
    free = compare_with_reference_block(aufbau_context("none"), sample)
    assert free.particle1_mismatch < 1e-12
    assert free.particle2_mismatch > 0.1
    bare = compare_with_reference_block(aufbau_context("bare"), sample)
    # Particle 1's block cancels to rounding in this context
    assert bare.particle1_mismatch == pytest.approx(1.0, abs=1e-12)
    assert bare.particle2_mismatch > 0.1
    assert bare.context_name == aufbau_context("bare").name
