"""
Scalar and vector fields on configuration space and the differential operators acting on them.

Every operator uses the closed-form derivative a field carries when there is one (and the scheme allows it), and falls
back to second-order central differences otherwise, optionally Richardson-extrapolated from steps h and h/2.
"""

from __future__ import annotations

from numbers import Real
from typing import Callable, Iterable, Optional, Union

import numpy as np

from susyqm import RADIUS_EPSILON, ExcludedPointError, SingularLocus, SingularPointError
from susyqm.data_models import FdScheme
from susyqm.geometry import distance_to_singularity, dot, exchange_12, exchange_12_vector, exchange_permutation

ArrayFn = Callable[[np.ndarray], np.ndarray]

DEFAULT_SCHEME = FdScheme()


class ScalarField:
    """A real function on 3n-dimensional configuration space, optionally carrying closed-form derivatives.

    Args:
        value: Maps (..., 3n) points to (...) values.
        n_particles: Number of particles n.
        gradient: Optional closed form mapping (..., 3n) -> (..., 3n).
        laplacian: Optional closed form mapping (..., 3n) -> (...).
        singular: Loci where derivatives are undefined; finite differences are not taken within 2 steps of them.
        name: Label used in reports and error messages.
    """

    def __init__(self, value: ArrayFn, n_particles: int, gradient: Optional[ArrayFn] = None,
                 laplacian: Optional[ArrayFn] = None, singular: Iterable[SingularLocus] = (), name: str = ""):
        self.value: ArrayFn = value
        self.n_particles: int = n_particles
        self.gradient: Optional[ArrayFn] = gradient
        self.laplacian: Optional[ArrayFn] = laplacian
        self.singular: frozenset = frozenset(singular)
        self.name: str = name

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.value(np.asarray(x, dtype=float)))

    def __repr__(self):
        return f"<{ScalarField.__name__} {self.name or 'unnamed'} n_particles={self.n_particles}>"

    @property
    def dim(self) -> int:
        return 3 * self.n_particles

    @classmethod
    def constant(cls, c: float, n_particles: int) -> "ScalarField":
        d = 3 * n_particles
        return cls(value=lambda x: np.full(np.shape(x)[:-1], float(c)), n_particles=n_particles,
                   gradient=lambda x: np.zeros(np.shape(x)[:-1] + (d,)),
                   laplacian=lambda x: np.zeros(np.shape(x)[:-1]), name=f"const({c})")

    def _check_compatible(self, other: "ScalarField"):
        if other.n_particles != self.n_particles:
            raise ValueError(f"Cannot combine a {self.n_particles}-particle field with a {other.n_particles}-particle "
                             f"field")

    def __add__(self, other: "ScalarField") -> "ScalarField":
        self._check_compatible(other)
        both_grad = self.gradient is not None and other.gradient is not None
        both_lap = self.laplacian is not None and other.laplacian is not None
        return ScalarField(
            value=lambda x: self.value(x) + other.value(x), n_particles=self.n_particles,
            gradient=(lambda x: self.gradient(x) + other.gradient(x)) if both_grad else None,
            laplacian=(lambda x: self.laplacian(x) + other.laplacian(x)) if both_lap else None,
            singular=self.singular | other.singular, name=f"({self.name} + {other.name})")

    def __neg__(self) -> "ScalarField":
        return self.scaled(-1.0)

    def __sub__(self, other: "ScalarField") -> "ScalarField":
        return self + (-other)

    def scaled(self, c: float) -> "ScalarField":
        return ScalarField(
            value=lambda x: c * self.value(x), n_particles=self.n_particles,
            gradient=(lambda x: c * self.gradient(x)) if self.gradient is not None else None,
            laplacian=(lambda x: c * self.laplacian(x)) if self.laplacian is not None else None,
            singular=self.singular, name=f"{c}*{self.name}")

    def __mul__(self, other: Union["ScalarField", Real]) -> "ScalarField":
        if isinstance(other, Real):
            return self.scaled(float(other))
        self._check_compatible(other)
        f, g = self, other
        both_grad = f.gradient is not None and g.gradient is not None
        both_lap = both_grad and f.laplacian is not None and g.laplacian is not None

        def product_gradient(x):
            return f.value(x)[..., np.newaxis] * g.gradient(x) + g.value(x)[..., np.newaxis] * f.gradient(x)

        def product_laplacian(x):
            return f.value(x) * g.laplacian(x) + g.value(x) * f.laplacian(x) + 2 * dot(f.gradient(x), g.gradient(x))

        return ScalarField(value=lambda x: f.value(x) * g.value(x), n_particles=f.n_particles,
                           gradient=product_gradient if both_grad else None,
                           laplacian=product_laplacian if both_lap else None,
                           singular=f.singular | g.singular, name=f"({f.name} * {g.name})")

    __rmul__ = __mul__

    def exp(self) -> "ScalarField":
        """exp(u) for this field u; lap exp(u) = exp(u) (lap u + |grad u|^2).
        """
        u = self

        def exp_gradient(x):
            return np.exp(u.value(x))[..., np.newaxis] * u.gradient(x)

        def exp_laplacian(x):
            g = u.gradient(x)
            return np.exp(u.value(x)) * (u.laplacian(x) + dot(g, g))

        return ScalarField(value=lambda x: np.exp(u.value(x)), n_particles=u.n_particles,
                           gradient=exp_gradient if u.gradient is not None else None,
                           laplacian=exp_laplacian if u.gradient is not None and u.laplacian is not None else None,
                           singular=u.singular, name=f"exp({u.name})")

    def exchanged(self) -> "ScalarField":
        """The field f(P12 x) for a two-particle field.
        """
        perm = exchange_permutation(self.n_particles)
        return ScalarField(
            value=lambda x: self.value(x[..., perm]), n_particles=self.n_particles,
            gradient=(lambda x: self.gradient(x[..., perm])[..., perm]) if self.gradient is not None else None,
            laplacian=(lambda x: self.laplacian(x[..., perm])) if self.laplacian is not None else None,
            singular=self.singular, name=f"P12 {self.name}")


class VectorField:
    """A 3n-component vector function on configuration space (superpotentials and sector-two states).

    Args:
        value: Maps (..., 3n) points to (..., 3n) vectors.
        n_particles: Number of particles n.
        jacobian: Optional closed form returning (..., 3n, 3n) with entry (i, j) = dF_j/du_i.
        divergence: Optional closed form of div F.
        grad_divergence: Optional closed form of grad(div F); together with the Jacobian this gives A-dagger . F a
         closed-form gradient.
        singular: Loci where derivatives are undefined.
        name: Label used in reports and error messages.
    """

    def __init__(self, value: ArrayFn, n_particles: int, jacobian: Optional[ArrayFn] = None,
                 divergence: Optional[ArrayFn] = None, grad_divergence: Optional[ArrayFn] = None,
                 singular: Iterable[SingularLocus] = (), name: str = ""):
        self.value: ArrayFn = value
        self.n_particles: int = n_particles
        self.jacobian: Optional[ArrayFn] = jacobian
        if divergence is None and jacobian is not None:
            divergence = lambda x: np.trace(jacobian(x), axis1=-2, axis2=-1)
        self.divergence: Optional[ArrayFn] = divergence
        self.grad_divergence: Optional[ArrayFn] = grad_divergence
        self.singular: frozenset = frozenset(singular)
        self.name: str = name

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.value(np.asarray(x, dtype=float)))

    def __repr__(self):
        return f"<{VectorField.__name__} {self.name or 'unnamed'} n_particles={self.n_particles}>"

    @property
    def dim(self) -> int:
        return 3 * self.n_particles

    @classmethod
    def zero(cls, n_particles: int) -> "VectorField":
        d = 3 * n_particles
        return cls(value=lambda x: np.zeros(np.shape(x)[:-1] + (d,)), n_particles=n_particles,
                   jacobian=lambda x: np.zeros(np.shape(x)[:-1] + (d, d)),
                   grad_divergence=lambda x: np.zeros(np.shape(x)[:-1] + (d,)), name="0")

    def __add__(self, other: "VectorField") -> "VectorField":
        if other.n_particles != self.n_particles:
            raise ValueError(f"Cannot add a {self.n_particles}-particle field to a {other.n_particles}-particle field")

        def summed(attr: str) -> Optional[ArrayFn]:
            a, b = getattr(self, attr), getattr(other, attr)
            return (lambda x: a(x) + b(x)) if a is not None and b is not None else None

        return VectorField(value=lambda x: self.value(x) + other.value(x), n_particles=self.n_particles,
                           jacobian=summed("jacobian"), divergence=summed("divergence"),
                           grad_divergence=summed("grad_divergence"), singular=self.singular | other.singular,
                           name=f"({self.name} + {other.name})")

    def __neg__(self) -> "VectorField":
        return self.scaled(-1.0)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + (-other)

    def scaled(self, c: float) -> "VectorField":
        def times_c(attr: str) -> Optional[ArrayFn]:
            fn = getattr(self, attr)
            return (lambda x: c * fn(x)) if fn is not None else None

        return VectorField(value=lambda x: c * self.value(x), n_particles=self.n_particles,
                           jacobian=times_c("jacobian"), divergence=times_c("divergence"),
                           grad_divergence=times_c("grad_divergence"), singular=self.singular,
                           name=f"{c}*{self.name}")

    def __mul__(self, other: Union[ScalarField, Real]) -> "VectorField":
        """Pointwise product with a scalar field (or a number).
        """
        if isinstance(other, Real):
            return self.scaled(float(other))
        if other.n_particles != self.n_particles:
            raise ValueError(f"Cannot multiply a {self.n_particles}-particle field by a {other.n_particles}-particle "
                             f"field")
        f, F = other, self
        jacobian = None
        divergence = None
        if f.gradient is not None and F.jacobian is not None:
            def jacobian(x):
                return f.gradient(x)[..., :, np.newaxis] * F.value(x)[..., np.newaxis, :] + \
                       f.value(x)[..., np.newaxis, np.newaxis] * F.jacobian(x)
        if f.gradient is not None and F.divergence is not None:
            def divergence(x):
                return dot(f.gradient(x), F.value(x)) + f.value(x) * F.divergence(x)
        return VectorField(value=lambda x: f.value(x)[..., np.newaxis] * F.value(x), n_particles=F.n_particles,
                           jacobian=jacobian, divergence=divergence, singular=F.singular | f.singular,
                           name=f"{f.name}*{F.name}")

    __rmul__ = __mul__

    def _exchanged_value(self, x: np.ndarray) -> np.ndarray:
        swapped = exchange_12(x)
        return exchange_12_vector(swapped, self.value(swapped))

    def exchanged(self) -> "VectorField":
        """P12 applied to a two-particle field: (P12 F)(x) = swap_blocks(F(swap_blocks(x))).
        """
        perm = exchange_permutation(self.n_particles)
        jacobian = None
        if self.jacobian is not None:
            def jacobian(x):
                return self.jacobian(x[..., perm])[..., perm, :][..., :, perm]
        return VectorField(
            value=self._exchanged_value, n_particles=self.n_particles, jacobian=jacobian,
            divergence=(lambda x: self.divergence(x[..., perm])) if self.divergence is not None else None,
            grad_divergence=(lambda x: self.grad_divergence(x[..., perm])[..., perm])
            if self.grad_divergence is not None else None,
            singular=self.singular, name=f"P12 {self.name}")


def _check_proximity(field: Union[ScalarField, VectorField], x: np.ndarray, threshold: float):
    if not field.singular:
        return
    if np.any(distance_to_singularity(x, field.singular) < threshold):
        raise SingularPointError(f"Point within {threshold:g} Bohr of a singular locus of {field!r} "
                                 f"({', '.join(sorted(locus.value for locus in field.singular))})")


def _prepare(field: Union[ScalarField, VectorField], x, s: FdScheme, analytic: bool) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != field.dim:
        raise ValueError(f"Expected points with {field.dim} coordinates for {field!r}; got {x.shape[-1]}")
    _check_proximity(field, x, RADIUS_EPSILON if analytic else 2 * s.step)
    return x


def _richardson(stencil: Callable[[float], np.ndarray], s: FdScheme) -> np.ndarray:
    coarse = stencil(s.step)
    if not s.richardson:
        return coarse
    fine = stencil(s.step / 2)
    return (4 * fine - coarse) / 3


def _central_first(fn: ArrayFn, x: np.ndarray, h: float) -> np.ndarray:
    """Central differences along every coordinate; the differentiated coordinate is inserted as axis -1 for scalar
    functions and axis -2 for vector functions.
    """
    shift = h * np.eye(x.shape[-1])
    stencil_points = x[..., np.newaxis, :]
    return (fn(stencil_points + shift) - fn(stencil_points - shift)) / (2 * h)


def _central_second_trace(fn: ArrayFn, x: np.ndarray, h: float) -> np.ndarray:
    shift = h * np.eye(x.shape[-1])
    stencil_points = x[..., np.newaxis, :]
    second = fn(stencil_points + shift) - 2 * fn(x)[..., np.newaxis] + fn(stencil_points - shift)
    return np.sum(second, axis=-1) / h ** 2


def grad(f: ScalarField, x, s: FdScheme = DEFAULT_SCHEME) -> np.ndarray:
    """Gradient of f at x (shape (..., 3n)).

    Raises:
        SingularPointError: If x is too close to a singular locus of f for the path taken.
    """
    analytic = s.use_analytic and f.gradient is not None
    x = _prepare(f, x, s, analytic)
    if analytic:
        return np.asarray(f.gradient(x))
    return _richardson(lambda h: _central_first(f.value, x, h), s)


def laplacian(f: ScalarField, x, s: FdScheme = DEFAULT_SCHEME) -> np.ndarray:
    analytic = s.use_analytic and f.laplacian is not None
    x = _prepare(f, x, s, analytic)
    if analytic:
        return np.asarray(f.laplacian(x))
    return _richardson(lambda h: _central_second_trace(f.value, x, h), s)


def jacobian(F: VectorField, x, s: FdScheme = DEFAULT_SCHEME) -> np.ndarray:
    """Jacobian of F at x with entry (i, j) = dF_j/du_i (shape (..., 3n, 3n)).
    """
    analytic = s.use_analytic and F.jacobian is not None
    x = _prepare(F, x, s, analytic)
    if analytic:
        return np.asarray(F.jacobian(x))
    return _richardson(lambda h: _central_first(F.value, x, h), s)


def divergence(F: VectorField, x, s: FdScheme = DEFAULT_SCHEME) -> np.ndarray:
    analytic = s.use_analytic and F.divergence is not None
    x = _prepare(F, x, s, analytic)
    if analytic:
        return np.asarray(F.divergence(x))
    return np.trace(_richardson(lambda h: _central_first(F.value, x, h), s), axis1=-2, axis2=-1)


def directional_derivative(f: ScalarField, x, direction, s: FdScheme = DEFAULT_SCHEME) -> np.ndarray:
    u = np.asarray(direction, dtype=float)
    return dot(grad(f, x, s), u / np.linalg.norm(u, axis=-1, keepdims=True))


def one_sided_log_derivative(f: ScalarField, x, direction, step: float = 1e-5) -> np.ndarray:
    """Forward difference of ln f along a unit direction; used to measure cusps, where central stencils straddle the
    discontinuity.

    Raises:
        ExcludedPointError: If f is not positive at either stencil point.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u, axis=-1, keepdims=True)
    here, there = f(x), f(x + step * u)
    if np.any(here <= 0) or np.any(there <= 0):
        raise ExcludedPointError(f"ln {f.name} is undefined where the field is not positive")
    return (np.log(there) - np.log(here)) / step


def gradient_field(f: ScalarField, s: FdScheme = DEFAULT_SCHEME) -> VectorField:
    """grad f as a vector field; its divergence is the Laplacian of f.
    """
    return VectorField(value=lambda x: grad(f, x, s), n_particles=f.n_particles,
                       divergence=(lambda x: laplacian(f, x, s)) if s.use_analytic and f.laplacian is not None
                       else None,
                       singular=f.singular, name=f"grad {f.name}")
