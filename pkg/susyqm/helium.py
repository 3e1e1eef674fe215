"""
Helium trial states: the Padé-Jastrow sector-one ansatz, its exact six-dimensional superpotential, and local energies.

The trial state is exp(u) with

    u = -z r1 - z r2 + J(r12),    J(s) = c s / (1 + alpha s)

(z = 2 and c = 1/2 by default). The superpotential is the exact -grad u, so A annihilates the trial state by
construction. Written out per particle block, with r12-hat = (r1 - r2) / r12:

    W_1 = z r1-hat - J'(r12) r12-hat
    W_2 = z r2-hat + J'(r12) r12-hat
"""

import logging
from typing import Dict, Optional, Tuple

import numpy as np

from susyqm import RADIUS_EPSILON, ExcludedPointError, SingularLocus
from susyqm.data_models import FdScheme, PadeJastrowParams
from susyqm.diffops import DEFAULT_SCHEME, ScalarField, VectorField, laplacian, one_sided_log_derivative
from susyqm.geometry import distance_to_singularity, norm
from susyqm.susy import ChargeContext

logger = logging.getLogger(__name__)

QUOTED_ALPHA = 0.353
"""Jastrow parameter quoted as optimal for the Padé-Jastrow state; the default of every command and context.

The state does not reach its lowest energy here. Sampling gives about -2.869 Hartree at this alpha, while the
energy curve bottoms out at about -2.878 near VARIATIONAL_MINIMUM_ALPHA.
"""
QUOTED_PADE_JASTROW_ENERGY = -2.878
"""Variational energy (Hartree) quoted for the Padé-Jastrow state. It equals the minimum of the sampled energy curve,
which lies near VARIATIONAL_MINIMUM_ALPHA rather than at QUOTED_ALPHA."""
ENERGY_AT_QUOTED_ALPHA = -2.869
"""Sampled energy (Hartree) of the Padé-Jastrow state at QUOTED_ALPHA (about 1e6 samples)."""
VARIATIONAL_MINIMUM_ALPHA = 0.15
"""Alpha near which the sampled Padé-Jastrow energy is lowest (z = 2, c = 1/2)."""
VARIATIONAL_MINIMUM_ENERGY = -2.878
EXACT_GROUND_ENERGY = -2.9037
"""Nonrelativistic helium ground energy, the variational floor for every trial state."""

ORIGINS = frozenset({SingularLocus.PARTICLE_ORIGINS})
COINCIDENCE = frozenset({SingularLocus.COINCIDENCE})


def _radii(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Particle positions, their radii, and the separation r12 of a (..., 6) batch.
    """
    p1 = x[..., 0:3]
    p2 = x[..., 3:6]
    return p1, p2, norm(p1), norm(p2), norm(p1 - p2)


def jastrow_derivatives(s: np.ndarray, params: PadeJastrowParams) -> Tuple[np.ndarray, ...]:
    """J(s) and its first three derivatives.
    """
    c, a = params.jastrow_coeff, params.alpha
    q = 1 + a * s
    return c * s / q, c / q ** 2, -2 * c * a / q ** 3, 6 * c * a ** 2 / q ** 4


def nuclear_exponent(z: float) -> ScalarField:
    """-z r1 - z r2 on six-dimensional configuration space.
    """

    def value(x):
        _, _, r1, r2, _ = _radii(x)
        return -z * (r1 + r2)

    def gradient(x):
        p1, p2, r1, r2, _ = _radii(x)
        return np.concatenate([-z * p1 / r1[..., np.newaxis], -z * p2 / r2[..., np.newaxis]], axis=-1)

    def lap(x):
        _, _, r1, r2, _ = _radii(x)
        return -2 * z / r1 - 2 * z / r2

    return ScalarField(value=value, n_particles=2, gradient=gradient, laplacian=lap, singular=ORIGINS,
                       name=f"-{z:g}(r1 + r2)")


def pair_jastrow(params: PadeJastrowParams) -> ScalarField:
    """J(r12); depends on r12 alone, so it is invariant under particle exchange.
    """

    def value(x):
        _, _, _, _, s = _radii(x)
        return jastrow_derivatives(s, params)[0]

    def gradient(x):
        p1, p2, _, _, s = _radii(x)
        j1 = jastrow_derivatives(s, params)[1]
        along = (j1 / s)[..., np.newaxis] * (p1 - p2)
        return np.concatenate([along, -along], axis=-1)

    def lap(x):
        _, _, _, _, s = _radii(x)
        _, j1, j2, _ = jastrow_derivatives(s, params)
        return 2 * (j2 + 2 * j1 / s)

    return ScalarField(value=value, n_particles=2, gradient=gradient, laplacian=lap, singular=COINCIDENCE,
                       name=f"J(r12; alpha={params.alpha:g})")


def jastrow_exponent(params: PadeJastrowParams) -> ScalarField:
    """The exponent u = -z r1 - z r2 + J(r12) of the trial state.
    """
    return nuclear_exponent(params.z_eff) + pair_jastrow(params)


def pade_jastrow(params: PadeJastrowParams) -> ScalarField:
    """The Padé-Jastrow trial state exp(u), with closed-form gradient and Laplacian. Its value is finite everywhere;
    derivatives are discontinuous at the nucleus and at electron coincidence.
    """
    field = jastrow_exponent(params).exp()
    field.name = f"pade_jastrow(alpha={params.alpha:g})"
    return field


def hydrogenic_product(z: float = 2.0) -> ScalarField:
    """exp(-z r1 - z r2): two independent hydrogenic 1s electrons, nodeless.
    """
    field = nuclear_exponent(z).exp()
    field.name = f"hydrogenic_product(z={z:g})"
    return field


def nuclear_superpotential(z: float) -> VectorField:
    """W = z r1-hat + z r2-hat, the superpotential of `hydrogenic_product`.
    """

    def value(x):
        p1, p2, r1, r2, _ = _radii(x)
        return np.concatenate([z * p1 / r1[..., np.newaxis], z * p2 / r2[..., np.newaxis]], axis=-1)

    def jac(x):
        p1, p2, r1, r2, _ = _radii(x)
        out = np.zeros(np.shape(x)[:-1] + (6, 6))
        for block, (p, r) in enumerate(((p1, r1), (p2, r2))):
            rr = r[..., np.newaxis, np.newaxis]
            outer = p[..., :, np.newaxis] * p[..., np.newaxis, :]
            out[..., 3 * block:3 * block + 3, 3 * block:3 * block + 3] = z * (np.eye(3) - outer / rr ** 2) / rr
        return out

    def div(x):
        _, _, r1, r2, _ = _radii(x)
        return 2 * z / r1 + 2 * z / r2

    def grad_div(x):
        p1, p2, r1, r2, _ = _radii(x)
        return np.concatenate([-2 * z * p1 / r1[..., np.newaxis] ** 3, -2 * z * p2 / r2[..., np.newaxis] ** 3],
                              axis=-1)

    return VectorField(value=value, n_particles=2, jacobian=jac, divergence=div, grad_divergence=grad_div,
                       singular=ORIGINS, name=f"{z:g}(r1-hat + r2-hat)")


def pair_superpotential(params: PadeJastrowParams) -> VectorField:
    """-grad J(r12): particle-1 block -J' r12-hat, particle-2 block +J' r12-hat.

    With g = J'/s and d = r1 - r2, the Jacobian is built from M = g I + (g'/s) d d^T as [[-M, M], [M, -M]].
    """

    def value(x):
        p1, p2, _, _, s = _radii(x)
        along = (jastrow_derivatives(s, params)[1] / s)[..., np.newaxis] * (p1 - p2)
        return np.concatenate([-along, along], axis=-1)

    def jac(x):
        p1, p2, _, _, s = _radii(x)
        _, j1, j2, _ = jastrow_derivatives(s, params)
        g = j1 / s
        g_prime = (j2 * s - j1) / s ** 2
        d = p1 - p2
        m = g[..., np.newaxis, np.newaxis] * np.eye(3) + \
            (g_prime / s)[..., np.newaxis, np.newaxis] * d[..., :, np.newaxis] * d[..., np.newaxis, :]
        top = np.concatenate([-m, m], axis=-1)
        bottom = np.concatenate([m, -m], axis=-1)
        return np.concatenate([top, bottom], axis=-2)

    def div(x):
        _, _, _, _, s = _radii(x)
        _, j1, j2, _ = jastrow_derivatives(s, params)
        return -2 * (j2 + 2 * j1 / s)

    def grad_div(x):
        p1, p2, _, _, s = _radii(x)
        _, j1, j2, j3 = jastrow_derivatives(s, params)
        slope = (j3 + 2 * j2 / s - 2 * j1 / s ** 2) / s
        along = slope[..., np.newaxis] * (p1 - p2)
        return np.concatenate([-2 * along, 2 * along], axis=-1)

    return VectorField(value=value, n_particles=2, jacobian=jac, divergence=div, grad_divergence=grad_div,
                       singular=COINCIDENCE, name=f"-grad J(alpha={params.alpha:g})")


def helium_superpotential(params: PadeJastrowParams) -> VectorField:
    """Exact -grad ln of `pade_jastrow(params)`, with closed-form Jacobian, divergence and gradient of divergence.
    """
    field = nuclear_superpotential(params.z_eff) + pair_superpotential(params)
    field.name = f"W_PJ(alpha={params.alpha:g})"
    return field


def helium_potential(include_repulsion: bool = True, nuclear_charge: float = 2.0) -> ScalarField:
    """-Z/r1 - Z/r2 + 1/r12 (infinite nuclear mass); without the repulsion the problem separates into two ions.
    """

    def value(x):
        _, _, r1, r2, s = _radii(x)
        v = -nuclear_charge / r1 - nuclear_charge / r2
        return v + 1 / s if include_repulsion else v

    singular = ORIGINS | COINCIDENCE if include_repulsion else ORIGINS
    return ScalarField(value=value, n_particles=2, singular=singular,
                       name="V_He" if include_repulsion else "V_He(no repulsion)")


def helium_context(params: PadeJastrowParams, e0: float = QUOTED_PADE_JASTROW_ENERGY,
                   scheme: FdScheme = DEFAULT_SCHEME) -> ChargeContext:
    """Context generated by the Padé-Jastrow trial state. The trial state is not an exact eigenstate, so e0 is its
    variational energy rather than an exact eigenvalue.

    The default e0 is the quoted -2.878, the energy minimum reached near alpha = 0.15. At QUOTED_ALPHA the state's own
    energy is about -2.869, so pass e0 = ENERGY_AT_QUOTED_ALPHA (or a fresh vmc_energy) when the context must carry
    the energy of exactly this alpha.
    """
    return ChargeContext(helium_superpotential(params), e0, scheme, ground_state=pade_jastrow(params),
                         name=f"pade_jastrow(alpha={params.alpha:g})")


def independent_electron_context(z: float = 2.0, scheme: FdScheme = DEFAULT_SCHEME) -> ChargeContext:
    """Context of two noninteracting hydrogenic electrons: W = z r1-hat + z r2-hat, e0 = -z^2.
    """
    return ChargeContext(nuclear_superpotential(z), -z ** 2, scheme, ground_state=hydrogenic_product(z),
                         name=f"independent_electrons(z={z:g})")


def local_energies(psi: ScalarField, V: ScalarField, x: np.ndarray, s: FdScheme = DEFAULT_SCHEME) -> \
        Tuple[np.ndarray, np.ndarray]:
    """Local energies (-1/2 lap psi + V psi) / psi over a batch of points.

    Returns:
        The energies (NaN where excluded) and a boolean mask of excluded points: points within RADIUS_EPSILON (or two
        finite-difference steps on the numeric path) of a singular locus, nodes of psi, and non-finite results.
    """
    x = np.asarray(x, dtype=float)
    threshold = RADIUS_EPSILON if s.use_analytic and psi.laplacian is not None else 2 * s.step
    excluded = distance_to_singularity(x, psi.singular | V.singular) < threshold
    energies = np.full(x.shape[:-1], np.nan)
    kept = x[~excluded]
    if kept.shape[0] > 0:
        with np.errstate(divide="ignore", invalid="ignore"):
            psi_values = psi(kept)
            values = -0.5 * laplacian(psi, kept, s) / psi_values + V(kept)
        values[psi_values == 0] = np.nan
        energies[~excluded] = values
    excluded |= ~np.isfinite(energies)
    return energies, excluded


def local_energy(psi: ScalarField, x, V: Optional[ScalarField] = None, s: FdScheme = DEFAULT_SCHEME) -> float:
    """Local energy at a single point; V defaults to the full helium potential.

    Raises:
        ExcludedPointError: At a node of psi or a point too close to a singular locus.
    """
    V = helium_potential() if V is None else V
    energies, excluded = local_energies(psi, V, np.asarray(x, dtype=float)[np.newaxis, :], s)
    if excluded[0]:
        raise ExcludedPointError(f"Local energy of {psi.name} is undefined at {np.asarray(x)}")
    return float(energies[0])


def cusp_slopes(params: PadeJastrowParams, step: float = 1e-5,
                rng: Optional[np.random.Generator] = None) -> Dict[str, float]:
    """One-sided log-derivatives of the trial state at the two cusps.

    electron_electron: both electrons at a common point p, pulled apart symmetrically along u perpendicular to p; the
     slope is per unit of r12 and tends to c (1/2 by default).
    electron_nucleus: electron 1 at the nucleus moving along u perpendicular to r2; tends to -z.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    psi = pade_jastrow(params)

    p = rng.standard_normal(3)
    u = np.cross(p, rng.standard_normal(3))
    x0 = np.concatenate([p, p])
    # Moving a unit step along (u, -u) / sqrt(2) separates the electrons by sqrt(2).
    ee = one_sided_log_derivative(psi, x0, np.concatenate([u, -u]), step) / np.sqrt(2)

    q = rng.standard_normal(3)
    v = np.cross(q, rng.standard_normal(3))
    en = one_sided_log_derivative(psi, np.concatenate([np.zeros(3), q]), np.concatenate([v, np.zeros(3)]), step)
    slopes = {"electron_electron": float(ee), "electron_nucleus": float(en)}
    logger.debug(f"cusp slopes for alpha={params.alpha}: {slopes}")
    return slopes
