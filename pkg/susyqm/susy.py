"""
The supersymmetric factorization engine.

A `ChargeContext` fixes the superpotential W = -grad ln psi0 and the ground energy e0 of a sector-one problem. With the
charge operator A = grad + W and its adjoint A-dagger . F = -div F + W . F, the two sectors are

    H1 - e0 = 1/2 A-dagger . A        (scalar fields)
    H2      = 1/2 A A-dagger + e0     (vector fields)

in atomic units. H2 is only ever applied by composing these operators.
"""

import logging
from typing import Callable, Optional, Union

import numpy as np

from susyqm import RESIDUAL_FLOOR, DegenerateSampleError, NodelessViolationError
from susyqm.data_models import EigenResidualReport, FdScheme
from susyqm.diffops import DEFAULT_SCHEME, ScalarField, VectorField, divergence, grad, jacobian, laplacian
from susyqm.geometry import dot

logger = logging.getLogger(__name__)

Field = Union[ScalarField, VectorField]

HALF = 0.5
"""Kinetic prefactor of every Hamiltonian composition (atomic units)."""


class ChargeContext:
    """Superpotential and sector-one ground energy shared by every operator application.

    Args:
        W: The superpotential.
        e0: Sector-one ground energy (Hartree).
        scheme: Finite-difference settings used by the operators built from this context.
        ground_state: The field W was generated from, when there is one.
        name: Label for reports.
    """

    half_factor = HALF

    def __init__(self, W: VectorField, e0: float, scheme: FdScheme = DEFAULT_SCHEME,
                 ground_state: Optional[ScalarField] = None, name: str = ""):
        self._W = W
        self._e0 = float(e0)
        self._scheme = scheme
        self._ground_state = ground_state
        self._name = name or W.name

    @property
    def W(self) -> VectorField:
        return self._W

    @property
    def e0(self) -> float:
        return self._e0

    @property
    def scheme(self) -> FdScheme:
        return self._scheme

    @property
    def ground_state(self) -> Optional[ScalarField]:
        return self._ground_state

    @property
    def name(self) -> str:
        return self._name

    @property
    def n_particles(self) -> int:
        return self._W.n_particles

    def __repr__(self):
        return f"<{ChargeContext.__name__} {self._name} e0={self._e0} path={self._scheme.path.value}>"

    def with_scheme(self, scheme: FdScheme) -> "ChargeContext":
        return ChargeContext(self._W, self._e0, scheme, self._ground_state, self._name)

    def gradient_field_asymmetry(self, sample: np.ndarray) -> float:
        """Largest |dW_j/du_i - dW_i/du_j| over the sample; zero (to differentiation error) for a gradient field.
        """
        jac = jacobian(self._W, sample, self._scheme)
        return float(np.max(np.abs(jac - np.swapaxes(jac, -1, -2))))


def free_context(n_particles: int, scheme: FdScheme = DEFAULT_SCHEME) -> ChargeContext:
    """Context of a constant ground state: W = 0 and e0 = 0, so A is the plain gradient.
    """
    return ChargeContext(VectorField.zero(n_particles), 0.0, scheme,
                         ground_state=ScalarField.constant(1.0, n_particles), name="free")


def superpotential_from_ground_state(psi0: ScalarField, s: FdScheme = DEFAULT_SCHEME) -> VectorField:
    """W = -grad(psi0) / psi0.

    The divergence is closed-form when psi0 carries a closed-form gradient and Laplacian:
    div W = |grad psi0|^2 / psi0^2 - lap psi0 / psi0.

    Raises (on evaluation):
        NodelessViolationError: Where psi0 is not strictly positive.
    """

    def positive_values(x):
        p = psi0.value(x)
        if np.any(p <= 0):
            raise NodelessViolationError(f"{psi0.name or 'ground state'} is not positive at "
                                         f"{np.count_nonzero(p <= 0)} evaluation point(s)")
        return p

    def value(x):
        return -grad(psi0, x, s) / positive_values(x)[..., np.newaxis]

    div = None
    if s.use_analytic and psi0.gradient is not None and psi0.laplacian is not None:
        def div(x):
            p = positive_values(x)
            g = psi0.gradient(x)
            return dot(g, g) / p ** 2 - psi0.laplacian(x) / p

    return VectorField(value=value, n_particles=psi0.n_particles, divergence=div, singular=psi0.singular,
                       name=f"-grad ln {psi0.name}")


def apply_A(ctx: ChargeContext, f: ScalarField, s: Optional[FdScheme] = None) -> VectorField:
    """(A f)(x) = grad f(x) + W(x) f(x).

    The result has no closed-form Jacobian; its divergence is closed-form (lap f + div W f + W . grad f) when f and W
    carry the pieces and the scheme allows it.
    """
    s = ctx.scheme if s is None else s
    W = ctx.W

    def value(x):
        return grad(f, x, s) + W.value(x) * f.value(x)[..., np.newaxis]

    div = None
    if s.use_analytic and f.gradient is not None and f.laplacian is not None and W.divergence is not None:
        def div(x):
            return f.laplacian(x) + W.divergence(x) * f.value(x) + dot(W.value(x), f.gradient(x))

    return VectorField(value=value, n_particles=f.n_particles, divergence=div, singular=f.singular | W.singular,
                       name=f"A {f.name}")


def apply_Adag_dot(ctx: ChargeContext, F: VectorField, s: Optional[FdScheme] = None) -> ScalarField:
    """(A-dagger . F)(x) = -div F(x) + W(x) . F(x).

    The result carries the closed-form gradient -grad(div F) + J_W F + J_F W when F and W supply every piece;
    otherwise its gradient is taken by finite differences.
    """
    s = ctx.scheme if s is None else s
    W = ctx.W

    def value(x):
        return -divergence(F, x, s) + dot(W.value(x), F.value(x))

    gradient = None
    if s.use_analytic and None not in (F.jacobian, F.grad_divergence, W.jacobian):
        def gradient(x):
            return -F.grad_divergence(x) + np.einsum("...ij,...j->...i", W.jacobian(x), F.value(x)) + \
                   np.einsum("...ij,...j->...i", F.jacobian(x), W.value(x))

    return ScalarField(value=value, n_particles=F.n_particles, gradient=gradient, singular=F.singular | W.singular,
                       name=f"A+ . {F.name}")


def apply_H1(ctx: ChargeContext, V: ScalarField, f: ScalarField, s: Optional[FdScheme] = None) -> ScalarField:
    """(H1 f)(x) = -1/2 lap f(x) + V(x) f(x).
    """
    s = ctx.scheme if s is None else s
    return ScalarField(value=lambda x: -ctx.half_factor * laplacian(f, x, s) + V.value(x) * f.value(x),
                       n_particles=f.n_particles, singular=f.singular | V.singular, name=f"H1 {f.name}")


def apply_H2(ctx: ChargeContext, F: VectorField, s: Optional[FdScheme] = None) -> VectorField:
    """H2 F = 1/2 A(A-dagger . F) + e0 F, applied by composition.
    """
    s = ctx.scheme if s is None else s
    composed = apply_A(ctx, apply_Adag_dot(ctx, F, s), s)
    return VectorField(value=lambda x: ctx.half_factor * composed.value(x) + ctx.e0 * F.value(x),
                       n_particles=F.n_particles, singular=composed.singular, name=f"H2 {F.name}")


def magnitudes(values: np.ndarray, is_vector: bool) -> np.ndarray:
    return np.linalg.norm(values, axis=-1) if is_vector else np.abs(values)


def eigen_residual(apply_h: Callable[[Field], Field], field: Field, energy: float, sample: np.ndarray,
                   name: str = "") -> EigenResidualReport:
    """Pointwise relative residual |H F - E F| / max(|F|, floor) over a sample of points.

    Points where |F| does not exceed the floor carry no information about the eigenvalue and are left out of the
    aggregates.

    Args:
        apply_h: Maps a field to the Hamiltonian applied to it (e.g. `functools.partial(apply_H2, ctx)`).
        field: Scalar or vector field under test.
        energy: Eigenvalue to test against (Hartree).
        sample: (n_points, 3n) points.
        name: Label carried into the report.

    Raises:
        DegenerateSampleError: If the field is below the floor at every sample point.
    """
    sample = np.asarray(sample, dtype=float)
    is_vector = isinstance(field, VectorField)
    f_values = field(sample)
    size = magnitudes(f_values, is_vector)
    usable = size > RESIDUAL_FLOOR
    if not np.any(usable):
        raise DegenerateSampleError(f"{field.name or 'field'} is below the norm floor {RESIDUAL_FLOOR} at all "
                                    f"{len(size)} sample points")
    if not np.all(usable):
        logger.debug(f"{np.count_nonzero(~usable)} of {len(size)} sample points fall below the norm floor")
    h_values = apply_h(field)(sample[usable])
    residuals = magnitudes(h_values - energy * f_values[usable], is_vector) / np.maximum(size[usable], RESIDUAL_FLOOR)
    report = EigenResidualReport(name=name or field.name, points_tested=int(np.count_nonzero(usable)),
                                 max_relative_residual=float(np.max(residuals)),
                                 mean_relative_residual=float(np.mean(residuals)), energy_used=energy)
    logger.debug(f"{report.name}: max relative residual {report.max_relative_residual:.3e} at E = {energy}")
    return report


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of the angle between two sampled fields, treating all samples (and components) as one vector.
    """
    a = np.ravel(a)
    b = np.ravel(b)
    denominator = np.linalg.norm(a) * np.linalg.norm(b)
    if denominator == 0:
        return 0.0
    return float(np.dot(a, b) / denominator)


def proportionality_constant(values: np.ndarray, target: np.ndarray) -> float:
    """Least-squares c minimizing |values - c * target|.
    """
    target = np.ravel(target)
    denominator = np.dot(target, target)
    return float(np.dot(np.ravel(values), target) / denominator) if denominator > 0 else 0.0
