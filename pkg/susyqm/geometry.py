"""
Configuration-space primitives: points, per-particle blocks, distances and particle exchange.

A point (or a vector in configuration space) is a float array whose last axis has length 3n, particle i occupying the
contiguous block (3i, 3i+1, 3i+2). Every function broadcasts over leading axes, so batches of walkers or
finite-difference stencils are handled in one call.
"""

from typing import Iterable, Optional

import numpy as np

from susyqm import RADIUS_EPSILON, SingularLocus, SingularPointError


def n_particles_of(x: np.ndarray) -> int:
    """
    Raises:
        ValueError: If the last axis is not a multiple of 3.
    """
    size = np.shape(x)[-1]
    if size == 0 or size % 3 != 0:
        raise ValueError(f"Configuration arrays must have a positive multiple of 3 coordinates; got {size}")
    return size // 3


def as_config_point(coords, n_particles: Optional[int] = None) -> np.ndarray:
    """Validate coordinates and return them as a read-only float array.

    Args:
        coords: 3n coordinates (or a batch of them along leading axes).
        n_particles: If given, the last axis must have exactly 3 * n_particles entries.

    Returns:
        A read-only copy of the coordinates.
    """
    x = np.array(coords, dtype=float)
    found = n_particles_of(x)
    if n_particles is not None and found != n_particles:
        raise ValueError(f"Expected {3 * n_particles} coordinates for {n_particles} particles but found {3 * found}")
    x.setflags(write=False)
    return x


def particle_block(x: np.ndarray, i: int) -> np.ndarray:
    n = n_particles_of(x)
    if not 0 <= i < n:
        raise IndexError(f"Particle index {i} out of range for a {n}-particle configuration")
    return x[..., 3 * i:3 * i + 3]


def dot(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.sum(u * v, axis=-1)


def norm(v: np.ndarray) -> np.ndarray:
    return np.sqrt(dot(v, v))


def particle_radius(x: np.ndarray, i: int) -> np.ndarray:
    """Euclidean norm of particle i's block (its distance from the nucleus at the origin).
    """
    return norm(particle_block(x, i))


def pair_distance(x: np.ndarray, i: int, j: int) -> np.ndarray:
    """
    Raises:
        ValueError: If i == j.
        IndexError: If either index is out of range.
    """
    if i == j:
        raise ValueError(f"pair_distance needs two distinct particles; got i = j = {i}")
    return norm(particle_block(x, i) - particle_block(x, j))


def unit_vector_lift(x: np.ndarray, i: int) -> np.ndarray:
    """Embed particle i's radial unit vector into the full 3n-dimensional space (zeros in every other block).

    Raises:
        SingularPointError: If particle i is within RADIUS_EPSILON of the origin.
    """
    block = particle_block(x, i)
    r = norm(block)
    if np.any(r < RADIUS_EPSILON):
        raise SingularPointError(f"Particle {i} is within {RADIUS_EPSILON} Bohr of the origin")
    lifted = np.zeros(np.shape(x))
    lifted[..., 3 * i:3 * i + 3] = block / r[..., np.newaxis]
    return lifted


def exchange_permutation(n_particles: int) -> np.ndarray:
    """Index array that swaps the coordinate blocks of particles 0 and 1.

    Raises:
        NotImplementedError: Unless there are exactly two particles.
    """
    if n_particles != 2:
        raise NotImplementedError(f"Particle exchange is only supported for 2 particles; got {n_particles}")
    return np.array([3, 4, 5, 0, 1, 2])


def exchange_12(x: np.ndarray) -> np.ndarray:
    """Swap the blocks of particles 0 and 1 of a two-particle point.
    """
    return np.asarray(x)[..., exchange_permutation(n_particles_of(x))]


def exchange_12_vector(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Carry a configuration-space vector v attached at x over to the exchanged point exchange_12(x).

    The component blocks of v are swapped; x fixes the particle count and must match v in shape. A vector field is
    exchanged pointwise by (P12 F)(x) = exchange_12_vector(exchange_12(x), F(exchange_12(x))).

    Raises:
        ValueError: If x and v do not have the same shape.
        NotImplementedError: Unless there are exactly two particles.
    """
    x = np.asarray(x)
    v = np.asarray(v)
    if x.shape != v.shape:
        raise ValueError(f"Point and vector shapes differ: {x.shape} and {v.shape}")
    return v[..., exchange_permutation(n_particles_of(x))]


def distance_to_singularity(x: np.ndarray, loci: Iterable[SingularLocus]) -> np.ndarray:
    """Distance from x to the nearest of the given singular loci (inf when there are none).
    """
    x = np.asarray(x, dtype=float)
    n = n_particles_of(x)
    distances = [np.full(x.shape[:-1], np.inf)]
    loci = set(loci)
    if SingularLocus.PARTICLE_ORIGINS in loci:
        distances += [particle_radius(x, i) for i in range(n)]
    if SingularLocus.COINCIDENCE in loci:
        distances += [pair_distance(x, i, j) for i in range(n) for j in range(i + 1, n)]
    return np.min(np.stack(distances), axis=0)


def random_regular_points(rng: np.random.Generator, n_points: int, n_particles: int = 1, r_min: float = 0.1,
                          r_max: float = 20.0, min_pair_distance: float = 0.0) -> np.ndarray:
    """Draw points whose particles sit at radii uniform in [r_min, r_max] along isotropic directions.

    Args:
        rng: Random generator to draw from.
        n_points: Number of points to return.
        n_particles: Particles per point.
        r_min: Minimum particle radius (keeps points away from the nucleus).
        r_max: Maximum particle radius.
        min_pair_distance: Points with any pair closer than this are redrawn.

    Returns:
        A (n_points, 3 * n_particles) array.
    """
    points = np.zeros((0, 3 * n_particles))
    while points.shape[0] < n_points:
        directions = rng.standard_normal((n_points, n_particles, 3))
        directions /= np.linalg.norm(directions, axis=-1, keepdims=True)
        radii = rng.uniform(r_min, r_max, size=(n_points, n_particles, 1))
        candidates = (directions * radii).reshape(n_points, 3 * n_particles)
        if n_particles > 1 and min_pair_distance > 0:
            candidates = candidates[distance_to_singularity(candidates, {SingularLocus.COINCIDENCE}) >=
                                    min_pair_distance]
        points = np.concatenate([points, candidates])
    return points[:n_points]
