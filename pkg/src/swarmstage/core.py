"""Domain types and bounds handling shared by every optimizer variant.

Minimization is the engine-internal convention throughout; objectives with
a maximize sense are negated at the objective boundary. A particle's
``pbest_fitness`` is ``math.inf`` until its first evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, EvaluationError
from .rng import uniform_block

UNEVALUATED = math.inf


@dataclass(frozen=True)
class SearchSpace:
    """Box-bounded real search space.

    ``lower`` and ``upper`` must have length ``dimension`` with
    ``lower[d] < upper[d]`` everywhere.
    """

    dimension: int
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=np.float64)
        upper = np.asarray(self.upper, dtype=np.float64)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        problems = []
        if self.dimension < 1:
            problems.append(f"dimension must be >= 1, got {self.dimension}")
        if lower.shape != (self.dimension,) or upper.shape != (self.dimension,):
            problems.append(
                f"bounds must have shape ({self.dimension},), "
                f"got lower {lower.shape}, upper {upper.shape}"
            )
        elif not np.all(lower < upper):
            bad = int(np.argmin(upper - lower))
            problems.append(
                f"lower must be strictly below upper in every dimension; "
                f"dimension {bad} has [{lower[bad]}, {upper[bad]}]"
            )
        if problems:
            raise ConfigurationError(*problems)

    @classmethod
    def box(cls, dimension: int, lower: float, upper: float) -> "SearchSpace":
        """Hypercube with identical bounds in every dimension."""
        return cls(dimension, np.full(dimension, float(lower)), np.full(dimension, float(upper)))

    @property
    def velocity_max(self) -> np.ndarray:
        """Componentwise velocity cap: half the bound width."""
        return 0.5 * (self.upper - self.lower)


@dataclass
class Particle:
    """One candidate solution: position, velocity, and personal best."""

    position: np.ndarray
    velocity: np.ndarray
    pbest_position: np.ndarray
    pbest_fitness: float = UNEVALUATED


@dataclass
class Swarm:
    """An ordered group of particles plus the best record among them."""

    id: int
    particles: list[Particle]
    sbest_position: np.ndarray
    sbest_fitness: float = UNEVALUATED

    @classmethod
    def from_particles(cls, id: int, particles: list[Particle]) -> "Swarm":
        """Build a swarm computing sbest from members (ties: lowest index)."""
        best_i = 0
        for i, p in enumerate(particles):
            if p.pbest_fitness < particles[best_i].pbest_fitness:
                best_i = i
        best = particles[best_i]
        return cls(id, particles, best.pbest_position.copy(), best.pbest_fitness)


@dataclass(frozen=True)
class ProductionTotals:
    """Cumulative produced oil, produced water, and injected water volumes."""

    q_op: float
    q_wp: float
    q_wi: float

    def __post_init__(self):
        for name in ("q_op", "q_wp", "q_wi"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise EvaluationError(f"{name} must be finite, got {v}")
            if v < 0:
                raise EvaluationError(f"{name} must be non-negative, got {v}")


def init_population(space: SearchSpace, count: int, seed: int) -> list[Particle]:
    """Seeded uniform population; velocities zero, personal bests unevaluated.

    Positions come from the keyed draw contract at iteration -1, slot 0, so
    initialization is replayable independently of everything that follows.
    """
    if count < 1:
        raise ConfigurationError(f"population count must be >= 1, got {count}")
    r = uniform_block(seed, -1, 0, count, space.dimension, 0)
    positions = space.lower + r * (space.upper - space.lower)
    return [
        Particle(
            position=positions[i].copy(),
            velocity=np.zeros(space.dimension),
            pbest_position=positions[i].copy(),
            pbest_fitness=UNEVALUATED,
        )
        for i in range(count)
    ]


def clamp_to_bounds(particle: Particle, space: SearchSpace) -> Particle:
    """Clip out-of-bounds position components to the violated bound.

    Clipped components get zero velocity; in-bounds components pass through
    untouched. Personal-best state is unaffected.
    """
    pos = particle.position.copy()
    vel = particle.velocity.copy()
    below = pos < space.lower
    above = pos > space.upper
    pos[below] = space.lower[below]
    pos[above] = space.upper[above]
    vel[below | above] = 0.0
    return Particle(pos, vel, particle.pbest_position, particle.pbest_fitness)
