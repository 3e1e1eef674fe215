"""
Models the configuration and report records of the toolkit with help from pydantic.

For more info on pydantic, visit: https://pydantic-docs.helpmanual.io/

Notes:
    Models fall into three groups, which is how they are used:
    - numerical settings (FdScheme, PadeJastrowParams, MetropolisConfig)
    - results (EnergyEstimate, EigenResidualReport, RegenerationReport, ReferenceBlockComparison, AlphaScanResult)
    - export descriptions (GridSpec, RunManifest)
"""

from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, confloat, conint, validator

from susyqm import DEFAULT_FD_STEP, AufbauKind, DerivativePath, GridPlane, __version__


def _is_vector_of_right_length(v: np.ndarray, length: int) -> np.ndarray:
    v_sqz: np.ndarray = np.squeeze(np.asarray(v, dtype=float))

    if np.any(np.isnan(v_sqz)):
        raise ValueError("Numpy array cannot contain any NaN values")

    if v_sqz.ndim != 1:
        raise ValueError(
            f"field that should have been a vector was found to not have the right dimensions (number of dims found to "
            f"be {v_sqz.ndim} after squeezing the array)")
    if v_sqz.size != length:
        raise ValueError(
            f"Expected vector to be of length {length} but instead found the length to be {v_sqz.size}")
    return v_sqz


def _validator_for_numpy_array_deserialization(v: Union[str, np.ndarray, List[float], Tuple[float, ...]]) -> \
        np.ndarray:
    if isinstance(v, np.ndarray):
        return v
    elif isinstance(v, (list, tuple)):
        return np.array(v, dtype=float)
    elif isinstance(v, str):
        return np.fromstring(v.strip("[").strip("]"), sep=" ")
    else:
        raise ValueError(f"Attempted to parse value for an array-type field that is not handled: {type(v)}")


class FdScheme(BaseModel):
    """Finite-difference settings shared by every differential operator.

    Class Attributes:
        step: Base step h (Bohr) of the second-order central stencils.
        richardson: If true, stencils with steps h and h/2 are combined to cancel the leading truncation error.
        use_analytic: If false, closed-form derivatives supplied by a field are ignored and the finite-difference
         path is always taken.
    """

    step: confloat(ge=1e-6, le=1e-2) = DEFAULT_FD_STEP
    richardson: bool = True
    use_analytic: bool = True

    class Config:
        allow_mutation = False

    @property
    def path(self) -> DerivativePath:
        return DerivativePath.ANALYTIC if self.use_analytic else DerivativePath.NUMERIC

    @classmethod
    def for_path(cls, path: Union[str, DerivativePath], step: float = DEFAULT_FD_STEP) -> "FdScheme":
        return cls(step=step, use_analytic=DerivativePath(path) == DerivativePath.ANALYTIC)


class PadeJastrowParams(BaseModel):
    """Parameters of the helium Padé-Jastrow trial state exp(-z r1 - z r2 + c r12 / (1 + alpha r12)).

    Class Attributes:
        alpha: Jastrow denominator parameter.
        z_eff: Orbital exponent (2 for the bare helium nucleus).
        jastrow_coeff: Cusp numerator c (1/2 satisfies the electron-electron cusp).
    """

    alpha: confloat(gt=0)
    z_eff: confloat(gt=0) = 2.0
    jastrow_coeff: confloat(gt=0) = 0.5

    class Config:
        allow_mutation = False


class MetropolisConfig(BaseModel):
    """
    Class Attributes:
        n_walkers: Number of independent Markov chains.
        steps_per_walker: Total steps taken by each walker (burn-in included).
        burn_in: Leading steps of every walker that are discarded.
        step_size: Standard deviation (Bohr) of the Gaussian all-particle proposal, per coordinate.
        seed: Base seed; each walker derives its own stream from (seed, walker index).
        target_acceptance: Only used when reporting how far the measured acceptance is from the intended one.
    """

    n_walkers: conint(gt=0) = 64
    steps_per_walker: conint(gt=0) = 2000
    burn_in: conint(ge=0) = 200
    step_size: confloat(gt=0) = 0.5
    seed: conint(ge=0, lt=2 ** 64) = 0
    target_acceptance: confloat(gt=0, lt=1) = 0.5

    class Config:
        allow_mutation = False

    @validator("burn_in")
    def burn_in_shorter_than_run(cls, v, values):
        steps = values.get("steps_per_walker")
        if steps is not None and v >= steps:
            raise ValueError(f"burn_in ({v}) must be smaller than steps_per_walker ({steps})")
        return v

    @property
    def kept_steps(self) -> int:
        return self.steps_per_walker - self.burn_in

    @property
    def total_samples(self) -> int:
        return self.kept_steps * self.n_walkers


class EnergyEstimate(BaseModel):
    """Monte Carlo mean of an observable (an energy in Hartree unless stated otherwise) with its blocking error.
    """

    mean: float
    std_error: confloat(ge=0)
    n_samples: conint(ge=0)
    acceptance_rate: confloat(ge=0, le=1)
    blocks: conint(ge=0)
    n_skipped: conint(ge=0) = 0

    def summary(self) -> str:
        return f"{self.mean:.6f} +- {self.std_error:.6f} (samples={self.n_samples}, acceptance=" \
               f"{self.acceptance_rate:.4f}, blocks={self.blocks}, skipped={self.n_skipped})"


class EigenResidualReport(BaseModel):
    name: str = ""
    points_tested: conint(ge=0)
    max_relative_residual: confloat(ge=0)
    mean_relative_residual: confloat(ge=0)
    energy_used: float

    def passes(self, tolerance: float) -> bool:
        return self.max_relative_residual < tolerance


class RegenerationReport(BaseModel):
    """Similarity between A-dagger applied to an aufbau state and the matching (anti)symmetrized orbital product.

    Class Attributes:
        cosine_similarity: Sample cosine similarity of the two scalar fields.
        proportionality: Least-squares constant c in A-dagger . psi ~ c * target.
    """

    kind: AufbauKind
    points_tested: conint(ge=0)
    cosine_similarity: float
    proportionality: float


class ReferenceBlockComparison(BaseModel):
    """Relative mismatch of each particle block of a building block against the usually quoted closed form.
    """

    context_name: str
    points_tested: conint(ge=0)
    particle1_mismatch: confloat(ge=0)
    particle2_mismatch: confloat(ge=0)


class AlphaScanResult(BaseModel):
    alphas: List[float]
    estimates: List[EnergyEstimate]

    @validator("estimates")
    def one_estimate_per_alpha(cls, v, values):
        if "alphas" in values and len(v) != len(values["alphas"]):
            raise ValueError(f"Expected {len(values['alphas'])} estimates but got {len(v)}")
        return v

    @property
    def argmin_index(self) -> int:
        return int(np.argmin([estimate.mean for estimate in self.estimates]))

    @property
    def argmin(self) -> float:
        return self.alphas[self.argmin_index]

    @property
    def curve(self) -> List[Tuple[float, EnergyEstimate]]:
        return list(zip(self.alphas, self.estimates))


class GridSpec(BaseModel):
    """Regular grid on a coordinate plane (or along an axis line) through `center`.

    Class Attributes:
        plane: Plane or axis line the grid is laid on.
        center: Length-3 vector; the grid is centered (and, for odd resolutions, sampled) here.
        half_extent: Half the side length (Bohr) of the grid.
        resolution: Points per axis.
    """

    plane: GridPlane = GridPlane.XY
    center: np.ndarray = Field(default_factory=lambda: np.zeros(3))
    half_extent: confloat(gt=0) = 10.0
    resolution: conint(ge=2) = 201

    class Config:
        arbitrary_types_allowed = True  # Needed to allow numpy arrays to be used as fields
        json_encoders = {np.ndarray: lambda arr: np.array2string(arr)}

    _deserialize_center_vector_if_needed = validator("center", allow_reuse=True, pre=True)(
        _validator_for_numpy_array_deserialization)
    _check_center_is_correct_length_vector = validator("center", allow_reuse=True)(
        lambda v: _is_vector_of_right_length(v, 3))

    @property
    def axis_coordinates(self) -> np.ndarray:
        """Offsets from the center along each grid axis; exactly mirror-symmetric for odd resolutions.
        """
        if self.resolution % 2 == 1:
            m = self.resolution // 2
            return self.half_extent * (np.arange(-m, m + 1) / m)
        return np.linspace(-self.half_extent, self.half_extent, self.resolution)


class RunManifest(BaseModel):
    """Provenance record written next to every command's outputs.

    Class Attributes:
        outputs: Maps each emitted file name to the sha256 digest of its content.
    """

    command: str
    parameters: Dict[str, str] = {}
    seed: Optional[int] = None
    version: str = __version__
    outputs: Dict[str, str] = {}

    def to_text(self) -> str:
        lines = [f"command={self.command}", f"version={self.version}",
                 f"seed={'' if self.seed is None else self.seed}"]
        lines += [f"param.{key}={self.parameters[key]}" for key in sorted(self.parameters)]
        lines += [f"output.{name}={self.outputs[name]}" for name in sorted(self.outputs)]
        return "\n".join(lines) + "\n"
