import numpy as np
import pytest
from pydantic import ValidationError

from susyqm import AufbauKind, DerivativePath, GridPlane, __version__
from susyqm.data_models import AlphaScanResult, EigenResidualReport, EnergyEstimate, FdScheme, GridSpec, \
    MetropolisConfig, PadeJastrowParams, RegenerationReport, RunManifest


def test_fd_scheme_defaults():
    s = FdScheme()
    assert s.step == 1e-4
    assert s.richardson
    assert s.path == DerivativePath.ANALYTIC
    assert FdScheme.for_path("numeric").path == DerivativePath.NUMERIC


@pytest.mark.parametrize("step", [1e-7, 0.1, -1e-4])
def test_fd_scheme_rejects_steps_outside_range(step: float):
    with pytest.raises(ValidationError):
        FdScheme(step=step)


def test_fd_scheme_is_immutable():
    s = FdScheme()
    with pytest.raises(TypeError):
        s.step = 1e-3


def test_fd_scheme_unknown_path():
    with pytest.raises(ValueError):
        FdScheme.for_path("bogus")


def test_pade_jastrow_params():
    p = PadeJastrowParams(alpha=0.353)
    assert p.z_eff == 2.0
    assert p.jastrow_coeff == 0.5
    PadeJastrowParams.parse_raw(p.json())
    with pytest.raises(ValidationError):
        PadeJastrowParams(alpha=0.0)
    with pytest.raises(ValidationError):
        PadeJastrowParams(alpha=0.3, z_eff=-1.0)


def test_metropolis_config():
    cfg = MetropolisConfig(n_walkers=8, steps_per_walker=100, burn_in=10)
    assert cfg.kept_steps == 90
    assert cfg.total_samples == 720
    MetropolisConfig.parse_raw(cfg.json())


@pytest.mark.parametrize("burn_in", [100, 150])
def test_metropolis_config_burn_in_must_be_shorter(burn_in: int):
    with pytest.raises(ValidationError):
        MetropolisConfig(steps_per_walker=100, burn_in=burn_in)


def test_metropolis_config_seed_range():
    MetropolisConfig(seed=2 ** 64 - 1)
    with pytest.raises(ValidationError):
        MetropolisConfig(seed=2 ** 64)
    with pytest.raises(ValidationError):
        MetropolisConfig(seed=-1)


def test_energy_estimate_bounds():
    e = EnergyEstimate(mean=-2.878, std_error=0.001, n_samples=10, acceptance_rate=0.5, blocks=16)
    assert "-2.878000" in e.summary()
    with pytest.raises(ValidationError):
        EnergyEstimate(mean=0.0, std_error=-1.0, n_samples=1, acceptance_rate=0.5, blocks=1)
    with pytest.raises(ValidationError):
        EnergyEstimate(mean=0.0, std_error=0.0, n_samples=1, acceptance_rate=1.5, blocks=1)


def test_eigen_residual_report_passes():
    report = EigenResidualReport(points_tested=3, max_relative_residual=1e-9, mean_relative_residual=1e-10,
                                 energy_used=-0.5)
    assert report.passes(1e-8)
    assert not report.passes(1e-10)


def test_regeneration_report_kind():
    report = RegenerationReport(kind="triplet", points_tested=1, cosine_similarity=1.0, proportionality=3.0)
    assert report.kind is AufbauKind.TRIPLET


def test_alpha_scan_result():
    estimates = [EnergyEstimate(mean=m, std_error=0.01, n_samples=1, acceptance_rate=0.5, blocks=1)
                 for m in (-2.85, -2.88, -2.87)]
    result = AlphaScanResult(alphas=[0.1, 0.35, 0.6], estimates=estimates)
    assert result.argmin_index == 1
    assert result.argmin == 0.35
    assert [alpha for alpha, _ in result.curve] == [0.1, 0.35, 0.6]
    with pytest.raises(ValidationError):
        AlphaScanResult(alphas=[0.1], estimates=estimates)


def test_grid_spec_round_trip():
    g = GridSpec(plane=GridPlane.XZ, center=[0.5, -1.0, 2.0], half_extent=3.0, resolution=11)
    parsed = GridSpec.parse_raw(g.json())
    assert parsed.plane is GridPlane.XZ
    np.testing.assert_allclose(parsed.center, [0.5, -1.0, 2.0])


def test_grid_spec_validation():
    with pytest.raises(ValidationError):
        GridSpec(center=[0.0, 0.0])
    with pytest.raises(ValidationError):
        GridSpec(resolution=1)
    with pytest.raises(ValidationError):
        GridSpec(half_extent=0.0)
    with pytest.raises(ValidationError):
        GridSpec(center=[np.nan, 0.0, 0.0])


@pytest.mark.parametrize("resolution", [3, 21, 201])
def test_grid_axis_coordinates_are_mirror_symmetric(resolution: int):
    coords = GridSpec(half_extent=10.0, resolution=resolution).axis_coordinates
    assert coords.size == resolution
    np.testing.assert_array_equal(coords, -coords[::-1])
    assert coords[resolution // 2] == 0.0
    assert coords[0] == -10.0 and coords[-1] == 10.0


def test_run_manifest_text_is_sorted_and_stable():
    manifest = RunManifest(command="aufbau", parameters={"mode": "triplet", "context": "bare"}, seed=3,
                           outputs={"b.csv": "00", "a.csv": "11"})
    text = manifest.to_text()
    lines = text.splitlines()
    assert lines[:3] == ["command=aufbau", f"version={__version__}", "seed=3"]
    assert lines[3:] == ["param.context=bare", "param.mode=triplet", "output.a.csv=11", "output.b.csv=00"]
    assert text == manifest.copy().to_text()
