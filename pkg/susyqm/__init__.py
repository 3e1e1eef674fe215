"""Package containing the multi-dimensional SUSY-QM toolkit.

All quantities are in atomic units (Hartree, Bohr). Configuration-space points are numpy arrays whose last axis holds
the 3n Cartesian coordinates of n particles in block order (x_1, y_1, z_1, x_2, ...).
"""

from enum import Enum

__version__ = "0.1.0"

RADIUS_EPSILON = 1e-10
"""Points closer than this (in Bohr) to a Coulomb or unit-vector singularity are rejected."""

DEFAULT_FD_STEP = 1e-4
RESIDUAL_FLOOR = 1e-12


class SingularLocus(Enum):
    """Loci where a field's derivatives (or value) are undefined.

    Class attributes:
        PARTICLE_ORIGINS: Any particle sitting on the nucleus at the origin.
        COINCIDENCE: Two particles at the same point (r_ij = 0).
    """
    PARTICLE_ORIGINS = "particle origins"
    COINCIDENCE = "coincidence points"


class DerivativePath(Enum):
    """Selects how derivatives are taken when a field supplies closed forms.
    """
    ANALYTIC = "analytic"
    NUMERIC = "numeric"


class AufbauKind(Enum):
    """Stages of a two-electron sector-two trial state built from a one-electron state by the aufbau steps.
    """
    BUILDING_BLOCK = "building_block"
    EXCHANGED_BLOCK = "exchanged_block"
    TRIPLET = "triplet"
    SINGLET = "singlet"
    CORRELATED_TRIPLET = "correlated_triplet"
    CORRELATED_SINGLET = "correlated_singlet"


class GridPlane(Enum):
    """Planes (and axis lines) that grids for the exported field components can be laid on.
    """
    XY = "xy"
    XZ = "xz"
    YZ = "yz"
    X = "x"
    Y = "y"
    Z = "z"


class SusyQmError(Exception):
    """Base class for errors raised by the toolkit.
    """


class SingularPointError(SusyQmError, ValueError):
    """A point is too close to a singular locus of the field being evaluated.
    """


class NodelessViolationError(SusyQmError, ValueError):
    """A would-be ground state is not strictly positive where the superpotential is evaluated.
    """


class ExcludedPointError(SusyQmError, ValueError):
    """A local quantity was requested at a node of the trial function or at an excluded point.
    """


class DegenerateSampleError(SusyQmError, ValueError):
    """Every sample point fell below the residual norm floor.
    """


class SamplerQualityError(SusyQmError, RuntimeError):
    """Too many Monte Carlo samples had to be skipped for the estimate to be trusted.
    """
