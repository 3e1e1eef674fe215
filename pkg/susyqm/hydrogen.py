"""
Closed-form hydrogen catalog (Bohr radius 1, real 2p basis, all states unnormalized).

Sector one holds 1s = exp(-r), 2s = (1 - r/2) exp(-r/2) and 2p_k = x_k exp(-r/2). The superpotential generated by the
ground state is W = r-hat, and the four degenerate sector-two ground states are A applied to the n = 2 states:

    F_2s   = -(r/2) exp(-r/2)                   (= 2 A 2s)
    F_2p_k = [e_k + x_k r-hat / 2] exp(-r/2)    (= A 2p_k)
"""

import logging
from collections import OrderedDict
from enum import Enum
from typing import Dict, Mapping, Optional, Union

import numpy as np
from pydantic import BaseModel

from susyqm import SingularLocus
from susyqm.data_models import EigenResidualReport, FdScheme
from susyqm.diffops import DEFAULT_SCHEME, ScalarField, VectorField, divergence, laplacian
from susyqm.geometry import dot, norm, random_regular_points
from susyqm.susy import (ChargeContext, apply_A, apply_Adag_dot, apply_H2, cosine_similarity, eigen_residual,
                         magnitudes)

logger = logging.getLogger(__name__)

GROUND_ENERGY = -0.5
FIRST_EXCITED_ENERGY = -0.125
ORIGIN = frozenset({SingularLocus.PARTICLE_ORIGINS})


class HydrogenLabel(Enum):
    S1 = "1s"
    S2 = "2s"
    P2_X = "2p_x"
    P2_Y = "2p_y"
    P2_Z = "2p_z"

    @classmethod
    def parse(cls, label: Union[str, "HydrogenLabel"]) -> "HydrogenLabel":
        """Accepts the enum itself, its value, or the short forms used on the command line ("2px", "1,2s").

        Raises:
            ValueError: If the label is not in the catalog.
        """
        if isinstance(label, HydrogenLabel):
            return label
        normalized = str(label).strip().lower().replace("_", "")
        if normalized.startswith("1,"):
            normalized = normalized[2:]
        for member in cls:
            if member.value.replace("_", "") == normalized:
                return member
        raise ValueError(f"Unknown hydrogen state label: {label!r}; expected one of {[m.value for m in cls]}")

    @property
    def principal_number(self) -> int:
        return int(self.value[0])

    @property
    def axis(self) -> int:
        """Cartesian axis of a 2p state (0, 1, 2); -1 for s states.
        """
        return "xyz".index(self.value[-1]) if self.value.startswith("2p") else -1


P_LABELS = (HydrogenLabel.P2_X, HydrogenLabel.P2_Y, HydrogenLabel.P2_Z)
SECTOR_TWO_LABELS = (HydrogenLabel.S2,) + P_LABELS


class HydrogenState(BaseModel):
    """A sector-one eigenstate with closed-form gradient and Laplacian.
    """
    label: HydrogenLabel
    field: ScalarField
    energy: float

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False


class SectorTwoState(BaseModel):
    """One of the four degenerate sector-two ground states (energy -1/8 Hartree), with closed-form Jacobian,
    divergence and gradient of the divergence.
    """
    label: HydrogenLabel
    field: VectorField
    energy: float = FIRST_EXCITED_ENERGY

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @property
    def display_label(self) -> str:
        return f"1,{self.label.value}"


def _radius(x: np.ndarray) -> np.ndarray:
    return norm(x)


def _nonzero(r: np.ndarray) -> np.ndarray:
    """Radius safe for division in terms whose numerator vanishes at the origin.
    """
    return np.where(r > 0, r, 1.0)


def _s1_field() -> ScalarField:
    def gradient(x):
        r = _radius(x)
        return -(x / r[..., np.newaxis]) * np.exp(-r)[..., np.newaxis]

    def lap(x):
        r = _radius(x)
        return (1 - 2 / r) * np.exp(-r)

    return ScalarField(value=lambda x: np.exp(-_radius(x)), n_particles=1, gradient=gradient, laplacian=lap,
                       singular=ORIGIN, name="1s")


def _s2_field() -> ScalarField:
    def gradient(x):
        r = _radius(x)
        radial_derivative = np.exp(-r / 2) * (-1 + r / 4)
        return (radial_derivative / r)[..., np.newaxis] * x

    def lap(x):
        r = _radius(x)
        return np.exp(-r / 2) * (5 / 4 - r / 8 - 2 / r)

    def value(x):
        r = _radius(x)
        return (1 - r / 2) * np.exp(-r / 2)

    return ScalarField(value=value, n_particles=1, gradient=gradient, laplacian=lap, singular=ORIGIN, name="2s")


def _p2_field(k: int, name: str) -> ScalarField:
    unit = np.eye(3)[k]

    def gradient(x):
        r = _radius(x)
        e = np.exp(-r / 2)[..., np.newaxis]
        return unit * e - x[..., k:k + 1] * e * x / (2 * r[..., np.newaxis])

    def lap(x):
        r = _radius(x)
        return x[..., k] * np.exp(-r / 2) * (1 / 4 - 2 / r)

    return ScalarField(value=lambda x: x[..., k] * np.exp(-_radius(x) / 2), n_particles=1, gradient=gradient,
                       laplacian=lap, singular=ORIGIN, name=name)


def hydrogen_state(label: Union[str, HydrogenLabel]) -> HydrogenState:
    """Unnormalized real-form hydrogen eigenstate with its energy -1/(2 n^2).

    Raises:
        ValueError: If the label is not in the catalog.
    """
    label = HydrogenLabel.parse(label)
    if label is HydrogenLabel.S1:
        field = _s1_field()
    elif label is HydrogenLabel.S2:
        field = _s2_field()
    else:
        field = _p2_field(label.axis, label.value)
    return HydrogenState(label=label, field=field, energy=-1 / (2 * label.principal_number ** 2))


def hydrogen_superpotential() -> VectorField:
    """W = r-hat, the superpotential of the hydrogen ground state.
    """

    def value(x):
        return x / _radius(x)[..., np.newaxis]

    def jac(x):
        r = _radius(x)[..., np.newaxis, np.newaxis]
        outer = x[..., :, np.newaxis] * x[..., np.newaxis, :]
        return (np.eye(3) - outer / r ** 2) / r

    return VectorField(value=value, n_particles=1, jacobian=jac, divergence=lambda x: 2 / _radius(x),
                       grad_divergence=lambda x: -2 * x / _radius(x)[..., np.newaxis] ** 3, singular=ORIGIN,
                       name="r-hat")


def hydrogen_potential() -> ScalarField:
    return ScalarField(value=lambda x: -1 / _radius(x), n_particles=1, singular=ORIGIN, name="-1/r")


def hydrogen_context(scheme: FdScheme = DEFAULT_SCHEME) -> ChargeContext:
    return ChargeContext(hydrogen_superpotential(), GROUND_ENERGY, scheme,
                         ground_state=hydrogen_state(HydrogenLabel.S1).field, name="hydrogen")


def _sector_two_s_field() -> VectorField:
    def value(x):
        return -(x / 2) * np.exp(-_radius(x) / 2)[..., np.newaxis]

    def jac(x):
        r = _radius(x)
        outer = x[..., :, np.newaxis] * x[..., np.newaxis, :]
        e = np.exp(-r / 2)[..., np.newaxis, np.newaxis]
        return -0.5 * e * (np.eye(3) - outer / (2 * _nonzero(r)[..., np.newaxis, np.newaxis]))

    def div(x):
        r = _radius(x)
        return np.exp(-r / 2) * (-3 / 2 + r / 4)

    def grad_div(x):
        r = _radius(x)
        return (np.exp(-r / 2) * (1 - r / 8) / r)[..., np.newaxis] * x

    return VectorField(value=value, n_particles=1, jacobian=jac, divergence=div, grad_divergence=grad_div,
                       singular=ORIGIN, name="1,2s")


def _sector_two_p_field(k: int, name: str) -> VectorField:
    unit = np.eye(3)[k]

    def value(x):
        r = _radius(x)
        e = np.exp(-r / 2)
        h = e / (2 * _nonzero(r))
        return unit * e[..., np.newaxis] + (x[..., k] * h)[..., np.newaxis] * x

    def jac(x):
        r = _radius(x)
        e = np.exp(-r / 2)
        h = e / (2 * r)
        h_prime = -e * (r + 2) / (4 * r ** 2)
        xk = x[..., k]
        grad_e = -(x / (2 * r[..., np.newaxis])) * e[..., np.newaxis]
        term_unit = grad_e[..., :, np.newaxis] * unit
        term_k = (unit[:, np.newaxis] * x[..., np.newaxis, :]) * h[..., np.newaxis, np.newaxis]
        term_delta = np.eye(3) * (xk * h)[..., np.newaxis, np.newaxis]
        term_radial = (xk * h_prime / r)[..., np.newaxis, np.newaxis] * x[..., :, np.newaxis] * x[..., np.newaxis, :]
        return term_unit + term_k + term_delta + term_radial

    def div(x):
        r = _radius(x)
        return x[..., k] * np.exp(-r / 2) * (1 / r - 1 / 4)

    def grad_div(x):
        r = _radius(x)
        e = np.exp(-r / 2)
        kk = e * (1 / r - 1 / 4)
        kk_prime = e * (-1 / (2 * r) + 1 / 8 - 1 / r ** 2)
        return unit * kk[..., np.newaxis] + (x[..., k] * kk_prime / r)[..., np.newaxis] * x

    return VectorField(value=value, n_particles=1, jacobian=jac, divergence=div, grad_divergence=grad_div,
                       singular=ORIGIN, name=name)


def sector_two_state(label: Union[str, HydrogenLabel]) -> SectorTwoState:
    """Closed-form sector-two ground state with N = 1.

    Raises:
        ValueError: If the label has no sector-two partner (1s) or is not in the catalog.
    """
    label = HydrogenLabel.parse(label)
    if label not in SECTOR_TWO_LABELS:
        raise ValueError(f"{label.value} has no sector-two partner; expected one of "
                         f"{[m.value for m in SECTOR_TWO_LABELS]}")
    if label is HydrogenLabel.S2:
        field = _sector_two_s_field()
    else:
        field = _sector_two_p_field(label.axis, f"1,{label.value}")
    return SectorTwoState(label=label, field=field)


def superpose_sector_two(coefficients: Mapping[Union[str, HydrogenLabel], float]) -> VectorField:
    """Linear combination of degenerate sector-two states; again an H2 eigenstate at -1/8 Hartree.
    """
    if not coefficients:
        raise ValueError("At least one coefficient is needed for a superposition")
    combined = None
    for label, c in coefficients.items():
        term = sector_two_state(label).field.scaled(float(c))
        combined = term if combined is None else combined + term
    return combined


def _identity_report(name: str, deviations: np.ndarray, energy: float, points_tested: Optional[int] = None) -> \
        EigenResidualReport:
    if points_tested is None:
        points_tested = int(deviations.size)
    return EigenResidualReport(name=name, points_tested=points_tested,
                               max_relative_residual=float(np.max(deviations)),
                               mean_relative_residual=float(np.mean(deviations)), energy_used=energy)


def verify_consistency(path: str = "analytic", n_points: int = 1000, seed: int = 0,
                       step: float = 1e-4, sector_two_energy: float = FIRST_EXCITED_ENERGY) -> \
        Dict[str, EigenResidualReport]:
    """Run the hydrogen cross-checks and return one report per check, in order.

    Checks:
        superpotential_identity: |W.W - div W - (1 - 2/r)| (absolute).
        laplacian_identity: |lap 1s + 2 (e0 + 1/r) 1s| / |1s| (the Schrodinger equation solved for the Laplacian).
        annihilation: |A 1s| / |1s|.
        sector_two_<label>: H2 eigen-residuals of the four sector-two states at `sector_two_energy`.
        regeneration_<label>: 1 - cosine similarity between A-dagger . F and the sector-one state F came from.

    Args:
        path: "analytic" or "numeric"; selects the derivative path.
        n_points: Random points with 0.1 <= r <= 20.
        seed: Seed of the point sample.
        step: Finite-difference step of the numeric path.
        sector_two_energy: Energy the sector-two states are tested against (a wrong value is a negative control).
    """
    scheme = FdScheme.for_path(path, step)
    ctx = hydrogen_context(scheme)
    sample = random_regular_points(np.random.default_rng(seed), n_points, n_particles=1, r_min=0.1, r_max=20.0)
    r = _radius(sample)
    reports: Dict[str, EigenResidualReport] = OrderedDict()

    W_values = ctx.W(sample)
    identity = dot(W_values, W_values) - divergence(ctx.W, sample, scheme)
    reports["superpotential_identity"] = _identity_report("superpotential_identity", np.abs(identity - (1 - 2 / r)),
                                                          GROUND_ENERGY)

    ground = hydrogen_state(HydrogenLabel.S1).field
    psi = ground(sample)
    lap_residual = np.abs(laplacian(ground, sample, scheme) + 2 * (GROUND_ENERGY + 1 / r) * psi) / np.abs(psi)
    reports["laplacian_identity"] = _identity_report("laplacian_identity", lap_residual, GROUND_ENERGY)

    annihilated = magnitudes(apply_A(ctx, ground)(sample), is_vector=True) / np.abs(psi)
    reports["annihilation"] = _identity_report("annihilation", annihilated, GROUND_ENERGY)

    for label in SECTOR_TWO_LABELS:
        state = sector_two_state(label)
        key = f"sector_two_{label.value}"
        reports[key] = eigen_residual(lambda F: apply_H2(ctx, F), state.field, sector_two_energy, sample, name=key)

    for label in SECTOR_TWO_LABELS:
        state = sector_two_state(label)
        regenerated = apply_Adag_dot(ctx, state.field)(sample)
        target = hydrogen_state(label).field(sample)
        key = f"regeneration_{label.value}"
        gap = max(0.0, 1.0 - cosine_similarity(regenerated, target))
        reports[key] = _identity_report(key, np.array([gap]), sector_two_energy, points_tested=n_points)

    worst = max(reports.values(), key=lambda report: report.max_relative_residual)
    logger.info(f"hydrogen consistency ({scheme.path.value}, {n_points} points): worst check {worst.name} at "
                f"{worst.max_relative_residual:.3e}")
    return reports
