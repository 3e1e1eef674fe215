"""
Sector-two trial states for two electrons, assembled from orbital products.

A building block is A applied to an orbital product o1(r1) o2(r2). Its exchange partner, the (anti)symmetrized
combinations and their Jastrow-correlated versions all follow from the field algebra of `susyqm.diffops`, so exchange
symmetry holds exactly rather than to rounding.
"""

import logging
from typing import Callable, Optional, Union

import numpy as np
from pydantic import BaseModel

from susyqm import AufbauKind, SingularLocus
from susyqm.data_models import FdScheme, PadeJastrowParams, ReferenceBlockComparison, RegenerationReport
from susyqm.diffops import DEFAULT_SCHEME, ScalarField, VectorField
from susyqm.geometry import norm, random_regular_points
from susyqm.helium import QUOTED_ALPHA, helium_context, independent_electron_context, pair_jastrow
from susyqm.susy import ChargeContext, apply_A, apply_Adag_dot, cosine_similarity, free_context, \
    proportionality_constant

logger = logging.getLogger(__name__)

RadialFn = Callable[[np.ndarray], np.ndarray]

ALPHA_NORM = 1 / np.sqrt(np.pi)
BETA_NORM = 1 / (4 * np.sqrt(2 * np.pi))
CONTEXT_NAMES = ("pj", "bare", "none")


class Orbital:
    """A one-electron radial orbital with its first and second radial derivatives.
    """

    def __init__(self, label: str, radial: RadialFn, radial_prime: RadialFn, radial_second: RadialFn):
        self.label = label
        self.radial = radial
        self.radial_prime = radial_prime
        self.radial_second = radial_second

    def __repr__(self):
        return f"<{Orbital.__name__} {self.label}>"

    def __call__(self, r) -> np.ndarray:
        return self.radial(np.asarray(r, dtype=float))

    def on_particle(self, i: int, n_particles: int = 2) -> ScalarField:
        """The orbital as a field of particle i's position in n-particle configuration space.
        """
        block = slice(3 * i, 3 * i + 3)

        def radius(x):
            return norm(x[..., block])

        def gradient(x):
            r = radius(x)
            out = np.zeros(np.shape(x))
            out[..., block] = (self.radial_prime(r) / r)[..., np.newaxis] * x[..., block]
            return out

        def lap(x):
            r = radius(x)
            return self.radial_second(r) + 2 * self.radial_prime(r) / r

        return ScalarField(value=lambda x: self.radial(radius(x)), n_particles=n_particles, gradient=gradient,
                           laplacian=lap, singular={SingularLocus.PARTICLE_ORIGINS}, name=f"{self.label}(r{i + 1})")


def alpha_1s(zeta: float = 2.0) -> Orbital:
    """exp(-zeta r) / sqrt(pi); nodeless.
    """
    return Orbital(f"alpha_1s(zeta={zeta:g})",
                   radial=lambda r: ALPHA_NORM * np.exp(-zeta * r),
                   radial_prime=lambda r: -zeta * ALPHA_NORM * np.exp(-zeta * r),
                   radial_second=lambda r: zeta ** 2 * ALPHA_NORM * np.exp(-zeta * r))


def beta_2s(zeta: float = 1.0) -> Orbital:
    """exp(-zeta r) (1 - zeta r) / (4 sqrt(2 pi)); one radial node at r = 1 / zeta.
    """
    return Orbital(f"beta_2s(zeta={zeta:g})",
                   radial=lambda r: BETA_NORM * np.exp(-zeta * r) * (1 - zeta * r),
                   radial_prime=lambda r: BETA_NORM * zeta * np.exp(-zeta * r) * (zeta * r - 2),
                   radial_second=lambda r: BETA_NORM * zeta ** 2 * np.exp(-zeta * r) * (3 - zeta * r))


def orbital_product(o1: Orbital, o2: Orbital) -> ScalarField:
    """o1(r1) o2(r2), with closed-form gradient and Laplacian.
    """
    return o1.on_particle(0) * o2.on_particle(1)


class AufbauState(BaseModel):
    """A two-electron sector-two trial state.

    Class Attributes:
        kind: How the state was built.
        field: The six-dimensional vector field.
        product: The orbital product the building block was generated from.
        context_name: Name of the charge context A was taken in.
        params: Jastrow parameters, for correlated kinds.
    """

    kind: AufbauKind
    field: VectorField
    product: ScalarField
    context_name: str
    params: Optional[PadeJastrowParams] = None

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @property
    def exchange_sign(self) -> int:
        """+1 for singlet kinds, -1 for triplet kinds, 0 when the state has no definite exchange symmetry.
        """
        if self.kind in (AufbauKind.SINGLET, AufbauKind.CORRELATED_SINGLET):
            return 1
        if self.kind in (AufbauKind.TRIPLET, AufbauKind.CORRELATED_TRIPLET):
            return -1
        return 0


def aufbau_context(name: str, alpha: float = QUOTED_ALPHA, scheme: FdScheme = DEFAULT_SCHEME) -> ChargeContext:
    """The charge contexts building blocks are taken in.

    Args:
        name: "pj" for the Padé-Jastrow helium superpotential, "bare" for W = 2 r1-hat + 2 r2-hat (independent
         electrons, e0 = -4), "none" for W = 0.
        alpha: Jastrow parameter of the "pj" context.
        scheme: Derivative scheme of the context.
    """
    if name == "pj":
        return helium_context(PadeJastrowParams(alpha=alpha), scheme=scheme)
    if name == "bare":
        return independent_electron_context(2.0, scheme)
    if name == "none":
        return free_context(2, scheme)
    raise ValueError(f"Unknown aufbau context {name!r}; expected one of {CONTEXT_NAMES}")


def building_block(ctx: ChargeContext, o1: Orbital, o2: Orbital) -> AufbauState:
    """A applied to o1(r1) o2(r2).
    """
    product = orbital_product(o1, o2)
    return AufbauState(kind=AufbauKind.BUILDING_BLOCK, field=apply_A(ctx, product), product=product,
                       context_name=ctx.name)


def exchanged_block(block: AufbauState) -> AufbauState:
    """P12 applied to a building block (labels 1 and 2 interchanged in both argument and components).
    """
    _require_kind(block, (AufbauKind.BUILDING_BLOCK,), "exchanged_block")
    return AufbauState(kind=AufbauKind.EXCHANGED_BLOCK, field=block.field.exchanged(), product=block.product,
                       context_name=block.context_name)


def _require_kind(state: AufbauState, allowed, operation: str):
    if state.kind not in allowed:
        raise ValueError(f"{operation} needs a state of kind {' or '.join(kind.value for kind in allowed)}; got "
                         f"{state.kind.value}")


def combine(block: AufbauState, mode: Union[str, AufbauKind]) -> AufbauState:
    """Triplet = phi - P12 phi (antisymmetric), singlet = phi + P12 phi (symmetric).

    Raises:
        ValueError: If block is not a building block or mode is neither triplet nor singlet.
    """
    _require_kind(block, (AufbauKind.BUILDING_BLOCK,), "combine")
    mode = AufbauKind(mode)
    phi = block.field
    if mode is AufbauKind.TRIPLET:
        field = phi - phi.exchanged()
    elif mode is AufbauKind.SINGLET:
        field = phi + phi.exchanged()
    else:
        raise ValueError(f"combine mode must be triplet or singlet; got {mode.value}")
    field.name = f"{mode.value}[{phi.name}]"
    return AufbauState(kind=mode, field=field, product=block.product, context_name=block.context_name)


def correlation_factor(params: PadeJastrowParams) -> ScalarField:
    """exp(c r12 / (1 + delta r12)) with delta = params.alpha; depends on r12 only.
    """
    return pair_jastrow(params).exp()


def attach_correlation(state: AufbauState, params: PadeJastrowParams) -> AufbauState:
    """Multiply a triplet or singlet pointwise by the Jastrow correlation factor; its exchange symmetry is kept.
    """
    _require_kind(state, (AufbauKind.TRIPLET, AufbauKind.SINGLET), "attach_correlation")
    kind = AufbauKind.CORRELATED_TRIPLET if state.kind is AufbauKind.TRIPLET else AufbauKind.CORRELATED_SINGLET
    field = state.field * correlation_factor(params)
    field.name = f"J*{state.field.name}"
    return AufbauState(kind=kind, field=field, product=state.product, context_name=state.context_name,
                       params=params)


def regeneration_target(state: AufbauState) -> ScalarField:
    """The sector-one function A-dagger . state is compared with: the orbital product, (anti)symmetrized to match the
    state, and carrying the same correlation factor.
    """
    sign = state.exchange_sign
    if sign == 0:
        raise ValueError(f"{state.kind.value} states have no definite exchange symmetry")
    target = state.product + state.product.exchanged().scaled(float(sign))
    if state.params is not None:
        target = target * correlation_factor(state.params)
    return target


def aufbau_sample(n_points: int = 1000, seed: int = 0) -> np.ndarray:
    """Regular six-dimensional points for the aufbau checks (0.1 <= r_i <= 8, r12 >= 0.1).
    """
    return random_regular_points(np.random.default_rng(seed), n_points, n_particles=2, r_min=0.1, r_max=8.0,
                                 min_pair_distance=0.1)


def exchange_defect(state: AufbauState, sample: np.ndarray) -> float:
    """Largest |P12 F - sign F| over the sample, where sign is the state's exchange sign.
    """
    sign = state.exchange_sign
    if sign == 0:
        raise ValueError(f"{state.kind.value} states have no definite exchange symmetry")
    return float(np.max(np.abs(state.field.exchanged()(sample) - sign * state.field(sample))))


def regeneration_check(ctx: ChargeContext, state: AufbauState, sample: Optional[np.ndarray] = None) -> \
        RegenerationReport:
    """Compare A-dagger . state with the matching (anti)symmetrized product. Exact proportionality only holds when
    the product is an eigenfunction of the context's sector-one Hamiltonian, so this is a similarity report.
    """
    _require_kind(state, (AufbauKind.TRIPLET, AufbauKind.SINGLET, AufbauKind.CORRELATED_TRIPLET,
                          AufbauKind.CORRELATED_SINGLET), "regeneration_check")
    sample = aufbau_sample() if sample is None else np.asarray(sample, dtype=float)
    regenerated = apply_Adag_dot(ctx, state.field)(sample)
    target = regeneration_target(state)(sample)
    report = RegenerationReport(kind=state.kind, points_tested=len(sample),
                                cosine_similarity=cosine_similarity(regenerated, target),
                                proportionality=proportionality_constant(regenerated, target))
    logger.info(f"regeneration of {state.kind.value} in context {ctx.name}: cosine {report.cosine_similarity:.10f}, "
                f"constant {report.proportionality:.6g}")
    return report


def reference_block() -> VectorField:
    """The closed form usually quoted for A(alpha(r1) beta(r2)):
    -exp(-2 r1 - r2) [2 (1 - r2) r1-hat + r2-hat] times the orbital normalization.
    """

    def value(x):
        p1, p2 = x[..., 0:3], x[..., 3:6]
        r1, r2 = norm(p1), norm(p2)
        scale = -ALPHA_NORM * BETA_NORM * np.exp(-2 * r1 - r2)
        block1 = (scale * 2 * (1 - r2) / r1)[..., np.newaxis] * p1
        block2 = (scale / r2)[..., np.newaxis] * p2
        return np.concatenate([block1, block2], axis=-1)

    return VectorField(value=value, n_particles=2, singular={SingularLocus.PARTICLE_ORIGINS}, name="reference_block")


def compare_with_reference_block(ctx: ChargeContext, sample: Optional[np.ndarray] = None) -> ReferenceBlockComparison:
    """Per-particle relative mismatch |block_i - reference_i| / |reference_i| (norms over the whole sample) between
    the building block of alpha_1s and beta_2s in this context and `reference_block`.
    """
    sample = aufbau_sample() if sample is None else np.asarray(sample, dtype=float)
    built = building_block(ctx, alpha_1s(), beta_2s()).field(sample)
    reference = reference_block()(sample)
    mismatches = []
    for block in (slice(0, 3), slice(3, 6)):
        scale = np.linalg.norm(reference[..., block])
        mismatches.append(float(np.linalg.norm(built[..., block] - reference[..., block]) / scale))
    comparison = ReferenceBlockComparison(context_name=ctx.name, points_tested=len(sample),
                                          particle1_mismatch=mismatches[0], particle2_mismatch=mismatches[1])
    logger.info(f"reference block comparison in context {ctx.name}: particle 1 {mismatches[0]:.3e}, particle 2 "
                f"{mismatches[1]:.3e}")
    return comparison
