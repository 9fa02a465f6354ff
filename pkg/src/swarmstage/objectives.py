"""Benchmark objectives and the well-field production aggregate.

Every objective is exposed through :class:`ObjectiveSpec`, which couples a
vectorized batch evaluator with its search space and optimization sense.  The
engine always minimizes; maximize-sense objectives are negated inside the spec
so callers never handle signs themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import ProductionTotals, SearchSpace
from .errors import ConfigurationError, EvaluationError

SENSE_MINIMIZE = "minimize"
SENSE_MAXIMIZE = "maximize"

DEFAULT_WATER_WEIGHT = 0.1


def wcf(totals: ProductionTotals, weight_water: float = DEFAULT_WATER_WEIGHT) -> float:
    """Well cost function: oil revenue minus weighted water handling.

    Computes ``q_op - weight_water * (q_wp + q_wi)``.
    """
    for label, value in (
        ("q_op", totals.q_op),
        ("q_wp", totals.q_wp),
        ("q_wi", totals.q_wi),
    ):
        if not math.isfinite(value):
            raise EvaluationError(f"non-finite production total {label}={value!r}")
    return totals.q_op - weight_water * (totals.q_wp + totals.q_wi)


def _sphere(x: np.ndarray) -> np.ndarray:
    return np.sum(x * x, axis=1)


def _rastrigin(x: np.ndarray) -> np.ndarray:
    d = x.shape[1]
    return 10.0 * d + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x), axis=1)


def _rosenbrock(x: np.ndarray) -> np.ndarray:
    head = x[:, :-1]
    tail = x[:, 1:]
    return np.sum(100.0 * (tail - head * head) ** 2 + (1.0 - head) ** 2, axis=1)


def _ackley(x: np.ndarray) -> np.ndarray:
    d = x.shape[1]
    radial = np.sqrt(np.sum(x * x, axis=1) / d)
    cosine = np.sum(np.cos(2.0 * np.pi * x), axis=1) / d
    return -20.0 * np.exp(-0.2 * radial) - np.exp(cosine) + 20.0 + math.e


def _griewank(x: np.ndarray) -> np.ndarray:
    d = x.shape[1]
    denom = np.sqrt(np.arange(1, d + 1, dtype=np.float64))
    return 1.0 + np.sum(x * x, axis=1) / 4000.0 - np.prod(np.cos(x / denom), axis=1)


# name -> (batch evaluator, canonical bounds, optimum builder, minimum dimension)
_BENCHMARKS: dict[str, tuple[Callable[[np.ndarray], np.ndarray], tuple[float, float], Callable[[int], np.ndarray], int]] = {
    "sphere": (_sphere, (-5.12, 5.12), np.zeros, 1),
    "rastrigin": (_rastrigin, (-5.12, 5.12), np.zeros, 1),
    "rosenbrock": (_rosenbrock, (-5.0, 10.0), np.ones, 2),
    "ackley": (_ackley, (-32.768, 32.768), np.zeros, 1),
    "griewank": (_griewank, (-600.0, 600.0), np.zeros, 1),
}

BENCHMARK_NAMES = tuple(sorted(_BENCHMARKS))


@dataclass(frozen=True)
class ObjectiveSpec:
    """An objective bundled with its domain and optimization sense.

    Calling the spec with a ``(count, dimension)`` position block returns
    minimization-sense fitness values: maximize objectives come back negated
    so lower is always better inside the engine.
    """

    name: str
    dimension: int
    space: SearchSpace
    sense: str
    batch: Callable[[np.ndarray], np.ndarray]
    known_optimum: float | None = None
    optimum_position: np.ndarray | None = None

    def __post_init__(self) -> None:
        problems = []
        if self.sense not in (SENSE_MINIMIZE, SENSE_MAXIMIZE):
            problems.append(f"sense must be {SENSE_MINIMIZE!r} or {SENSE_MAXIMIZE!r}, got {self.sense!r}")
        if self.dimension < 1:
            problems.append(f"dimension must be positive, got {self.dimension}")
        if self.space.dimension != self.dimension:
            problems.append(
                f"search space has dimension {self.space.dimension}, objective declares {self.dimension}"
            )
        if problems:
            raise ConfigurationError(*problems)

    def __call__(self, positions: np.ndarray) -> np.ndarray:
        """Evaluate a position block, returning minimization-sense values."""
        values = self.batch(np.asarray(positions, dtype=np.float64))
        if self.sense == SENSE_MAXIMIZE:
            return -values
        return values

    def raw_value(self, engine_fitness: float) -> float:
        """Map an engine-side (minimization) fitness back to the raw scale."""
        if self.sense == SENSE_MAXIMIZE:
            return -engine_fitness
        return engine_fitness


def eval_benchmark(name: str, x: np.ndarray) -> float:
    """Evaluate one analytic benchmark at a single point."""
    if name not in _BENCHMARKS:
        raise ConfigurationError(
            f"unknown benchmark {name!r}; expected one of {', '.join(BENCHMARK_NAMES)}"
        )
    fn = _BENCHMARKS[name][0]
    point = np.asarray(x, dtype=np.float64)
    if point.ndim != 1:
        raise ConfigurationError(f"expected a flat coordinate vector, got shape {point.shape}")
    return float(fn(point[np.newaxis, :])[0])


def get_objective(name: str, dimension: int) -> ObjectiveSpec:
    """Build the named objective at the requested dimension.

    Benchmarks are minimize-sense on their canonical boxes.  ``well_proxy``
    is the maximize-sense production surrogate and is only defined at its
    native variable count.
    """
    if name in _BENCHMARKS:
        fn, (lower, upper), optimum_at, min_dim = _BENCHMARKS[name]
        if dimension < min_dim:
            raise ConfigurationError(
                f"benchmark {name!r} needs dimension >= {min_dim}, got {dimension}"
            )
        return ObjectiveSpec(
            name=name,
            dimension=dimension,
            space=SearchSpace.box(dimension, lower, upper),
            sense=SENSE_MINIMIZE,
            batch=fn,
            known_optimum=0.0,
            optimum_position=optimum_at(dimension),
        )
    if name == "well_proxy":
        from . import well_proxy

        return well_proxy.proxy_objective(dimension)
    raise ConfigurationError(
        f"unknown objective {name!r}; expected one of "
        f"{', '.join(BENCHMARK_NAMES + ('well_proxy',))}"
    )
