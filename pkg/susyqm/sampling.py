"""
Metropolis sampling of |psi|^2, Monte Carlo estimates with blocking error bars, and Gauss-Laguerre radial quadrature.

Random numbers come from numpy's PCG64. Every walker owns two generators seeded by
`SeedSequence(seed, spawn_key=(walker, 0))` (proposals) and `SeedSequence(seed, spawn_key=(walker, 1))` (acceptance
uniforms), so a walker's chain depends only on the base seed and its index, and runs are bit-reproducible.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import roots_laguerre

from susyqm import RADIUS_EPSILON, SamplerQualityError
from susyqm.data_models import AlphaScanResult, EnergyEstimate, FdScheme, MetropolisConfig, PadeJastrowParams
from susyqm.diffops import DEFAULT_SCHEME, ScalarField, VectorField
from susyqm.geometry import distance_to_singularity, dot
from susyqm.helium import helium_potential, local_energies, pade_jastrow
from susyqm.susy import ChargeContext, apply_A, apply_H2

logger = logging.getLogger(__name__)

MAX_SKIP_FRACTION = 0.01
PLATEAU_TOLERANCE = 0.05
MIN_BLOCKS = 16
CHUNK_STEPS = 128
THREADS_ENV_VAR = "SUSYQM_THREADS"

Observable = Callable[[np.ndarray], np.ndarray]


def max_worker_threads() -> int:
    """Thread cap from SUSYQM_THREADS; all cores when it is unset or not a positive integer.
    """
    raw = os.environ.get(THREADS_ENV_VAR, "").strip()
    if raw:
        try:
            value = int(raw)
            if value > 0:
                return value
        except ValueError:
            pass
        logger.warning(f"Ignoring {THREADS_ENV_VAR}={raw!r}: expected a positive integer")
    return os.cpu_count() or 1


def squared(field: Union[ScalarField, VectorField], name: Optional[str] = None) -> ScalarField:
    """|field|^2 as a sampling density.
    """
    if isinstance(field, VectorField):
        value = lambda x: dot(field.value(x), field.value(x))
    else:
        value = lambda x: field.value(x) ** 2
    return ScalarField(value=value, n_particles=field.n_particles, singular=field.singular,
                       name=name or f"|{field.name}|^2")


class MetropolisSampler:
    """Random-walk Metropolis chains over a density, one per walker, advanced together.

    Iterating yields one (n_walkers, 3n) array per post-burn-in step. Proposals are isotropic Gaussian moves of all
    coordinates at once; a proposal x' is accepted when u * rho(x) < rho(x') for a uniform u. Proposals within
    RADIUS_EPSILON of a singular locus are rejected without evaluating the density.

    Args:
        density: Nonnegative function to sample (|psi|^2 up to a constant).
        cfg: Walker count, steps, burn-in, step size and seed.
        loci: Singular loci to keep walkers away from; defaults to those of the density.
    """

    def __init__(self, density: ScalarField, cfg: MetropolisConfig, loci=None):
        self.density = density
        self.cfg = cfg
        self.loci = density.singular if loci is None else frozenset(loci)
        self.dim = density.dim
        self.accepted = 0
        self.proposed = 0
        self.singular_rejections = 0

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposed if self.proposed else 0.0

    def _generator(self, walker: int, stream: int) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.cfg.seed, spawn_key=(walker, stream))))

    def _evaluate(self, x: np.ndarray) -> np.ndarray:
        rho = np.asarray(self.density(x), dtype=float)
        if np.any(rho < 0):
            raise ValueError(f"Sampling density {self.density.name} evaluated negative at {np.count_nonzero(rho < 0)} "
                             f"point(s)")
        return rho

    def initial_positions(self) -> np.ndarray:
        """Unit-Gaussian starting points, redrawn per walker until they clear every singular locus.
        """
        positions = np.empty((self.cfg.n_walkers, self.dim))
        for walker in range(self.cfg.n_walkers):
            rng = self._generator(walker, 2)
            candidate = rng.standard_normal(self.dim)
            while self.loci and distance_to_singularity(candidate, self.loci) < RADIUS_EPSILON:
                candidate = rng.standard_normal(self.dim)
            positions[walker] = candidate
        return positions

    def __iter__(self) -> Iterator[np.ndarray]:
        cfg = self.cfg
        proposal_rngs = [self._generator(walker, 0) for walker in range(cfg.n_walkers)]
        uniform_rngs = [self._generator(walker, 1) for walker in range(cfg.n_walkers)]
        x = self.initial_positions()
        rho = self._evaluate(x)

        for chunk_start in range(0, cfg.steps_per_walker, CHUNK_STEPS):
            chunk = min(CHUNK_STEPS, cfg.steps_per_walker - chunk_start)
            moves = cfg.step_size * np.stack([rng.standard_normal((chunk, self.dim)) for rng in proposal_rngs])
            uniforms = np.stack([rng.random(chunk) for rng in uniform_rngs])
            for k in range(chunk):
                proposal = x + moves[:, k]
                near = distance_to_singularity(proposal, self.loci) < RADIUS_EPSILON if self.loci else \
                    np.zeros(cfg.n_walkers, dtype=bool)
                rho_new = np.zeros(cfg.n_walkers)
                if not np.all(near):
                    rho_new[~near] = self._evaluate(proposal[~near])
                accept = ~near & (uniforms[:, k] * rho < rho_new)
                x = np.where(accept[:, np.newaxis], proposal, x)
                rho = np.where(accept, rho_new, rho)
                self.proposed += cfg.n_walkers
                self.accepted += int(np.count_nonzero(accept))
                self.singular_rejections += int(np.count_nonzero(near))
                if chunk_start + k >= cfg.burn_in:
                    yield x.copy()


def metropolis_sample(density: ScalarField, cfg: MetropolisConfig, loci=None) -> MetropolisSampler:
    """Stream of post-burn-in walker batches drawn from `density`; see `MetropolisSampler`.
    """
    return MetropolisSampler(density, cfg, loci)


def collect_samples(density: ScalarField, cfg: MetropolisConfig, loci=None) -> np.ndarray:
    """All post-burn-in samples as a (kept_steps, n_walkers, 3n) array.
    """
    return np.stack(list(metropolis_sample(density, cfg, loci)))


def blocking_curve(series: Sequence[float]) -> List[Tuple[int, float]]:
    """Standard error of the mean at each blocking level, as (block size, error) pairs.

    Each level averages neighbouring pairs of the previous one (a trailing odd element is dropped).
    """
    data = np.asarray(series, dtype=float)
    curve = []
    block_size = 1
    while data.size >= 2:
        curve.append((block_size, float(np.sqrt(np.var(data) / (data.size - 1)))))
        half = data.size // 2
        data = 0.5 * (data[0:2 * half:2] + data[1:2 * half:2])
        block_size *= 2
    return curve


def blocking_analysis(series: Sequence[float]) -> Tuple[float, int]:
    """Standard error of an autocorrelated series by repeated blocking.

    The reported error is taken at the first level whose estimate changes by less than 5% from the previous level
    (two zero estimates also count), among levels that still have at least 16 blocks. Without such a plateau the
    largest error over those levels is reported.

    Returns:
        The error and the number of blocks at the level it was taken from.
    """
    n = len(series)
    curve = blocking_curve(series)
    if not curve:
        return 0.0, n
    usable = [(size, error) for size, error in curve if n // size >= MIN_BLOCKS] or curve[:1]
    for (_, previous), (size, error) in zip(usable, usable[1:]):
        if (previous == 0 and error == 0) or (previous > 0 and abs(error - previous) < PLATEAU_TOLERANCE * previous):
            return error, n // size
    size, error = max(usable, key=lambda item: item[1])
    logger.debug(f"no blocking plateau in {len(usable)} levels; reporting the largest error {error:.3e}")
    return error, n // size


def estimate_observable(density: ScalarField, observable: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]],
                        cfg: MetropolisConfig, loci=None, label: str = "observable") -> EnergyEstimate:
    """Mean of an observable over Metropolis samples of a density, with a blocking error.

    Args:
        density: Sampling density.
        observable: Maps a (n_walkers, 3n) batch to (values, excluded mask); excluded samples are skipped and counted.
        cfg: Sampler configuration.
        loci: Singular loci proposals are kept away from; defaults to those of the density.
        label: Used in log messages.

    Raises:
        SamplerQualityError: If more than 1% of the samples were skipped.
    """
    sampler = metropolis_sample(density, cfg, loci)
    step_means = []
    total = 0.0
    counted = 0
    skipped = 0
    for batch in sampler:
        values, excluded = observable(batch)
        values = np.asarray(values, dtype=float)
        excluded = np.asarray(excluded, dtype=bool) | ~np.isfinite(values)
        skipped += int(np.count_nonzero(excluded))
        kept = values[~excluded]
        if kept.size:
            step_means.append(float(np.mean(kept)))
            total += float(np.sum(kept))
            counted += kept.size
    n_samples = counted + skipped
    if n_samples == 0 or skipped > MAX_SKIP_FRACTION * n_samples:
        raise SamplerQualityError(f"{label}: skipped {skipped} of {n_samples} samples (limit "
                                  f"{MAX_SKIP_FRACTION:.0%})")
    error, blocks = blocking_analysis(step_means)
    estimate = EnergyEstimate(mean=total / counted, std_error=error, n_samples=counted,
                              acceptance_rate=sampler.acceptance_rate, blocks=blocks, n_skipped=skipped)
    logger.info(f"{label}: {estimate.summary()}; {sampler.singular_rejections} proposals rejected near singular loci")
    return estimate


def vmc_energy(psi: ScalarField, V: ScalarField, cfg: MetropolisConfig, s: FdScheme = DEFAULT_SCHEME) -> \
        EnergyEstimate:
    """Variational Monte Carlo energy: the mean local energy over samples of |psi|^2.
    """
    loci = psi.singular | V.singular
    return estimate_observable(squared(psi), lambda batch: local_energies(psi, V, batch, s), cfg, loci=loci,
                               label=f"VMC {psi.name}")


def _helium_estimate(params: PadeJastrowParams, cfg: MetropolisConfig, s: FdScheme) -> EnergyEstimate:
    return vmc_energy(pade_jastrow(params), helium_potential(), cfg, s)


def alpha_scan(alphas: Sequence[float], cfg: MetropolisConfig, template: Optional[PadeJastrowParams] = None,
               s: FdScheme = DEFAULT_SCHEME) -> AlphaScanResult:
    """Helium VMC energy at each alpha, run on a thread pool capped by SUSYQM_THREADS.

    The run for alphas[i] uses seed cfg.seed + i, so each point of the curve is reproducible on its own.

    Args:
        alphas: Jastrow parameters to scan (nonempty).
        cfg: Sampler configuration shared by every point.
        template: Supplies z_eff and jastrow_coeff; alpha is replaced per point.
        s: Derivative scheme of the local energies.
    """
    if len(alphas) == 0:
        raise ValueError("alpha_scan needs at least one alpha")
    template = PadeJastrowParams(alpha=alphas[0]) if template is None else template
    jobs = [(PadeJastrowParams(alpha=alpha, z_eff=template.z_eff, jastrow_coeff=template.jastrow_coeff),
             MetropolisConfig(**{**cfg.dict(), "seed": (cfg.seed + i) % 2 ** 64})) for i, alpha in enumerate(alphas)]
    with ThreadPoolExecutor(max_workers=min(max_worker_threads(), len(jobs))) as executor:
        estimates = list(executor.map(lambda job: _helium_estimate(job[0], job[1], s), jobs))
    result = AlphaScanResult(alphas=[float(alpha) for alpha in alphas], estimates=estimates)
    logger.info(f"alpha scan over {len(alphas)} values: minimum {result.estimates[result.argmin_index].mean:.6f} "
                f"at alpha = {result.argmin}")
    return result


def mc_inner_product(f: Union[ScalarField, VectorField], g: Union[ScalarField, VectorField], weight: ScalarField,
                     cfg: MetropolisConfig) -> EnergyEstimate:
    """Importance-sampled estimate of (integral of f . g) / (integral of weight), sampling the weight.

    The weight must be positive wherever f . g is nonzero; samples where it vanishes are skipped.
    """

    def ratio(batch):
        fg = f(batch) * g(batch)
        if fg.ndim == batch.ndim:
            fg = np.sum(fg, axis=-1)
        w = weight(batch)
        with np.errstate(divide="ignore", invalid="ignore"):
            return fg / w, w <= 0

    loci = f.singular | g.singular | weight.singular
    return estimate_observable(weight, ratio, cfg, loci=loci, label=f"<{f.name}|{g.name}>")


def charge_norm_ratio(ctx: ChargeContext, psi: ScalarField, cfg: MetropolisConfig) -> EnergyEstimate:
    """|A psi|^2 / |psi|^2 (both integrated), which equals 2 (E - e0) for an eigenstate psi of energy E.

    Samples the nodeless weight |A psi|^2 and inverts the estimate of |psi|^2 / |A psi|^2; the direct estimator under
    psi^2 has unbounded variance where psi has nodes.
    """
    charged = apply_A(ctx, psi)
    inverse = mc_inner_product(psi, psi, squared(charged), cfg)
    mean = 1 / inverse.mean
    return inverse.copy(update={"mean": mean, "std_error": inverse.std_error * mean ** 2})


def vmc_sector_two_energy(ctx: ChargeContext, F: VectorField, cfg: MetropolisConfig) -> EnergyEstimate:
    """Rayleigh quotient <F|H2|F> / <F|F> from samples of |F|^2 with the local energy F . (H2 F) / |F|^2.
    """
    h2 = apply_H2(ctx, F)

    def local(batch):
        f = F(batch)
        size = dot(f, f)
        with np.errstate(divide="ignore", invalid="ignore"):
            return dot(f, h2(batch)) / size, size == 0

    return estimate_observable(squared(F), local, cfg, loci=F.singular | ctx.W.singular,
                               label=f"sector-two {F.name}")


def radial_quadrature(integrand: Callable[[np.ndarray], np.ndarray], order: int = 64, decay: float = 1.0) -> float:
    """Integral of `integrand` over [0, inf) by Gauss-Laguerre quadrature.

    The integrand is rescaled as r = t / decay, so the rule is exact for polynomials times exp(-decay r) of degree
    below 2 * order.
    """
    nodes, weights = roots_laguerre(order)
    return float(np.sum(weights * np.exp(nodes) * integrand(nodes / decay)) / decay)


def spherical_integral(radial_fn: Callable[[np.ndarray], np.ndarray], order: int = 64, decay: float = 1.0) -> float:
    """Integral over all of 3-D space of a spherically symmetric function given by its radial profile.
    """
    return 4 * np.pi * radial_quadrature(lambda r: r ** 2 * radial_fn(r), order, decay)
