"""Named algorithm presets.

Each preset expands to a coefficient schedule plus a staging plan sized for a
given iteration budget.  The staged presets split the budget by fixed
fractions: the two-stage variants spend a fifth of the budget on five
independent swarms before collapsing, and the multi-stage variant halves the
swarm count every fifth of the budget until the final two-fifths run as one
swarm.  At the reference budget of 125 iterations that yields stage lengths
of 25/100 and 25/25/25/50.
"""

from __future__ import annotations

from .engine import StagePlan
from .errors import ConfigurationError
from .schedules import ScheduleSpec

ALGORITHM_NAMES = ("canonical", "ldiw", "tvac", "2spso", "tvac-2spso", "ms2pso")

DEFAULT_POPULATION = 40
DEFAULT_T_MAX = 125
DEFAULT_SEEDS = (1, 2)

# (swarm count, fraction of the iteration budget) per stage
_STAGE_SHAPES: dict[str, tuple[tuple[int, float], ...]] = {
    "2spso": ((5, 0.2), (1, 0.8)),
    "tvac-2spso": ((5, 0.2), (1, 0.8)),
    "ms2pso": ((8, 0.2), (4, 0.2), (2, 0.2), (1, 0.4)),
}

_SCHEDULES = {
    "canonical": ScheduleSpec.constant,
    "ldiw": ScheduleSpec.ldiw,
    "tvac": ScheduleSpec.tvac,
    "2spso": ScheduleSpec.constant,
    "tvac-2spso": ScheduleSpec.tvac,
    "ms2pso": ScheduleSpec.tvac,
}


def _check_algorithm(algorithm: str) -> None:
    if algorithm not in ALGORITHM_NAMES:
        raise ConfigurationError(
            f"unknown algorithm {algorithm!r}; expected one of {', '.join(ALGORITHM_NAMES)}"
        )


def preset_schedule(algorithm: str) -> ScheduleSpec:
    """The coefficient schedule a named algorithm runs with."""
    _check_algorithm(algorithm)
    return _SCHEDULES[algorithm]()


def preset_stage_plan(algorithm: str, t_max: int = DEFAULT_T_MAX) -> StagePlan:
    """The staging plan a named algorithm runs with at the given budget."""
    _check_algorithm(algorithm)
    if t_max < 1:
        raise ConfigurationError(f"t_max must be positive, got {t_max}")
    shape = _STAGE_SHAPES.get(algorithm)
    if shape is None:
        return StagePlan.single_stage(t_max)
    iterations = [int(round(fraction * t_max)) for _, fraction in shape[:-1]]
    iterations.append(t_max - sum(iterations))
    if min(iterations) < 1:
        raise ConfigurationError(
            f"t_max={t_max} is too small to split across {len(shape)} stages for {algorithm!r}"
        )
    return StagePlan(tuple((count, n) for (count, _), n in zip(shape, iterations)))


def preset(algorithm: str, t_max: int = DEFAULT_T_MAX) -> tuple[ScheduleSpec, StagePlan]:
    """Expand a named algorithm to its (schedule, stage plan) pair."""
    return preset_schedule(algorithm), preset_stage_plan(algorithm, t_max)
