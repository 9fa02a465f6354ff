"""PSO step kernel orchestration, swarm bookkeeping, and the stage manager.

One engine realizes every variant. Canonical PSO is a single-swarm,
single-stage plan; the staged variants start with several independent
swarms and merge them at stage boundaries until one remains. In
multi-swarm stages each particle is attracted to its own swarm's best
record; the population-wide best is tracked for reporting only.

State lives in contiguous (population x dimension) arrays; a swarm is a
contiguous block of rows. Blocks merge pairwise-adjacent at collapse, so
particles never reorder and the keyed random streams (tied to global row
index) are unaffected by staging.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .core import UNEVALUATED, Particle, SearchSpace, Swarm, clamp_to_bounds, init_population
from .errors import ConfigurationError, EvaluationError
from .kernels import advance_block, velocity_block, velocity_math
from .rng import RngStreamKey
from .schedules import IterationClock, ScheduleSpec, coefficients_at

Objective = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class StagePlan:
    """Ordered (swarm_count, iterations) pairs; swarm counts shrink to 1.

    Each successive count must divide the previous one so swarms merge in
    whole adjacent groups, and the first count must divide the population.
    """

    stages: tuple[tuple[int, int], ...]

    def __post_init__(self):
        stages = tuple((int(c), int(n)) for c, n in self.stages)
        object.__setattr__(self, "stages", stages)
        problems = []
        if not stages:
            problems.append("stage plan must have at least one stage")
        for idx, (count, iters) in enumerate(stages):
            if count < 1:
                problems.append(f"stage {idx}: swarm count must be >= 1, got {count}")
            if iters < 1:
                problems.append(f"stage {idx}: iterations must be >= 1, got {iters}")
        if stages and stages[-1][0] != 1:
            problems.append(f"final stage must have 1 swarm, got {stages[-1][0]}")
        for idx in range(1, len(stages)):
            prev, cur = stages[idx - 1][0], stages[idx][0]
            if cur > prev:
                problems.append(f"stage {idx}: swarm count {cur} exceeds previous {prev}")
            elif cur >= 1 and prev % cur != 0:
                problems.append(f"stage {idx}: swarm count {cur} does not divide previous {prev}")
        if problems:
            raise ConfigurationError(*problems)

    @classmethod
    def single_stage(cls, t_max: int) -> "StagePlan":
        return cls(((1, t_max),))

    @property
    def t_max(self) -> int:
        return sum(n for _, n in self.stages)

    def validate_population(self, population_size: int) -> None:
        first = self.stages[0][0]
        if population_size % first != 0:
            raise ConfigurationError(
                f"population size {population_size} is not divisible by "
                f"stage-1 swarm count {first}"
            )

    def swarm_count_at(self, t: int) -> int:
        """Scheduled swarm count for iteration t."""
        acc = 0
        for count, iters in self.stages:
            acc += iters
            if t < acc:
                return count
        return 1


@dataclass
class RunState:
    """Mutable state of one optimization run. Owned by a single run."""

    space: SearchSpace
    seed: int
    positions: np.ndarray
    velocities: np.ndarray
    pbest_positions: np.ndarray
    pbest_fitness: np.ndarray
    swarm_bounds: list[tuple[int, int]]
    sbest_index: list[int]
    clock: IterationClock
    eval_count: int = 0

    @property
    def population_size(self) -> int:
        return self.positions.shape[0]

    @property
    def swarm_count(self) -> int:
        return len(self.swarm_bounds)

    @property
    def sbest_fitness(self) -> list[float]:
        return [float(self.pbest_fitness[i]) for i in self.sbest_index]

    @property
    def gbest_index(self) -> int:
        best = self.sbest_index[0]
        for i in self.sbest_index[1:]:
            if self.pbest_fitness[i] < self.pbest_fitness[best]:
                best = i
        return best

    @property
    def gbest_fitness(self) -> float:
        return float(self.pbest_fitness[self.gbest_index])

    @property
    def gbest_position(self) -> np.ndarray:
        return self.pbest_positions[self.gbest_index].copy()

    @property
    def swarms(self) -> list[Swarm]:
        """Object view of the array state (copies; edits do not write back)."""
        out = []
        for j, (lo, hi) in enumerate(self.swarm_bounds):
            particles = [
                Particle(
                    self.positions[i].copy(),
                    self.velocities[i].copy(),
                    self.pbest_positions[i].copy(),
                    float(self.pbest_fitness[i]),
                )
                for i in range(lo, hi)
            ]
            out.append(
                Swarm(
                    j,
                    particles,
                    self.pbest_positions[self.sbest_index[j]].copy(),
                    float(self.pbest_fitness[self.sbest_index[j]]),
                )
            )
        return out


@dataclass(frozen=True)
class IterationRecord:
    """One history row: best records after iteration t."""

    t: int
    gbest_fitness: float
    sbest_fitness: tuple[float, ...]
    coefficients: tuple[float, float, float]
    particle_fitness: tuple[float, ...] | None = None


@dataclass
class RunHistory:
    """Replayable audit trail of one run."""

    records: list[IterationRecord]
    gbest_position: np.ndarray
    gbest_fitness: float
    eval_count: int
    seed: int
    config_digest: str
    meta: dict = field(default_factory=dict)


def config_digest_for(payload: dict) -> str:
    """sha256 over canonical JSON; the replay identity of a configuration."""
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def velocity_update(
    particle: Particle,
    attractor: np.ndarray,
    omega: float,
    c1: float,
    c2: float,
    key_base: RngStreamKey | None = None,
    vmax: np.ndarray | None = None,
    *,
    r1: np.ndarray | None = None,
    r2: np.ndarray | None = None,
) -> np.ndarray:
    """New velocity for one particle.

    Draws r1/r2 from slots 0 and 1 of ``key_base``'s stream unless both are
    injected explicitly (tests use that to pin the arithmetic). ``vmax``
    of None skips the clamp.
    """
    attractor = np.asarray(attractor, dtype=np.float64)
    if attractor.shape != particle.position.shape:
        raise ValueError(
            f"attractor shape {attractor.shape} does not match "
            f"position shape {particle.position.shape}"
        )
    dim = particle.position.shape[0]
    cap = np.full(dim, np.inf) if vmax is None else np.asarray(vmax, dtype=np.float64)
    if r1 is not None or r2 is not None:
        if r1 is None or r2 is None:
            raise ValueError("inject both r1 and r2 or neither")
        return velocity_math(
            particle.position,
            particle.velocity,
            particle.pbest_position,
            attractor,
            omega,
            c1,
            c2,
            cap,
            np.asarray(r1, dtype=np.float64),
            np.asarray(r2, dtype=np.float64),
        )
    if key_base is None:
        raise ValueError("key_base is required when draws are not injected")
    return velocity_block(
        particle.position[None, :],
        particle.velocity[None, :],
        particle.pbest_position[None, :],
        attractor,
        omega,
        c1,
        c2,
        cap,
        key_base.seed,
        key_base.iteration,
        key_base.particle_global_index,
    )[0]


def position_update(particle: Particle, space: SearchSpace) -> Particle:
    """Advance position by the (already updated) velocity, then clamp."""
    moved = Particle(
        particle.position + particle.velocity,
        particle.velocity.copy(),
        particle.pbest_position,
        particle.pbest_fitness,
    )
    return clamp_to_bounds(moved, space)


def evaluate_and_update_bests(
    swarm: Swarm, objective: Objective, clock: IterationClock
) -> Swarm:
    """Evaluate every member once and refresh pbest/sbest records.

    A personal best is replaced only on strict improvement; ties keep the
    incumbent. The swarm best is the minimum member pbest, ties broken by
    lowest particle index.
    """
    positions = np.stack([p.position for p in swarm.particles])
    fitness = np.asarray(objective(positions), dtype=np.float64)
    _check_finite(fitness, positions, clock.t)
    particles = []
    for p, f in zip(swarm.particles, fitness):
        if f < p.pbest_fitness:
            particles.append(Particle(p.position, p.velocity, p.position.copy(), float(f)))
        else:
            particles.append(p)
    return Swarm.from_particles(swarm.id, particles)


def collapse_swarms(swarms: list[Swarm], target_count: int) -> list[Swarm]:
    """Merge adjacent swarm groups down to ``target_count`` swarms.

    Particles keep position, velocity, and pbest untouched; each merged
    swarm's best is the minimum member pbest (ties: lowest index).
    """
    current = len(swarms)
    if target_count < 1 or current % target_count != 0:
        raise ConfigurationError(
            f"cannot collapse {current} swarms into {target_count}: not a divisor"
        )
    group = current // target_count
    merged = []
    for j in range(target_count):
        members = []
        for s in swarms[j * group : (j + 1) * group]:
            members.extend(s.particles)
        merged.append(Swarm.from_particles(j, members))
    return merged


def _check_finite(fitness: np.ndarray, positions: np.ndarray, t: int) -> None:
    bad = np.flatnonzero(~np.isfinite(fitness))
    if bad.size:
        i = int(bad[0])
        raise EvaluationError(
            f"objective returned non-finite value {fitness[i]} at iteration {t} "
            f"for particle {i} at position {positions[i].tolist()}",
            particle_index=i,
            position=positions[i].copy(),
        )


def _evaluate(
    objective: Objective,
    positions: np.ndarray,
    parallelism: int,
    executor: ThreadPoolExecutor | None,
) -> np.ndarray:
    """Batch-evaluate positions; results reassemble in particle order.

    Evaluations are pure functions of position, so chunked concurrent
    execution cannot change any value, only the wall clock.
    """
    n = positions.shape[0]
    if executor is None or parallelism <= 1 or n < 2:
        out = np.asarray(objective(positions), dtype=np.float64)
    else:
        chunks = np.array_split(np.arange(n), min(parallelism, n))
        parts = executor.map(lambda idx: np.asarray(objective(positions[idx]), dtype=np.float64), chunks)
        out = np.concatenate(list(parts))
    if out.shape != (n,):
        raise EvaluationError(
            f"objective returned shape {out.shape} for {n} positions; expected ({n},)"
        )
    return out


def init_state(
    space: SearchSpace,
    population_size: int,
    stage_plan: StagePlan,
    seed: int,
) -> RunState:
    """Seeded initial state: block-partitioned swarms, nothing evaluated yet."""
    stage_plan.validate_population(population_size)
    particles = init_population(space, population_size, seed)
    positions = np.stack([p.position for p in particles])
    first_count = stage_plan.stages[0][0]
    block = population_size // first_count
    bounds = [(j * block, (j + 1) * block) for j in range(first_count)]
    return RunState(
        space=space,
        seed=seed,
        positions=positions,
        velocities=np.zeros_like(positions),
        pbest_positions=positions.copy(),
        pbest_fitness=np.full(population_size, UNEVALUATED),
        swarm_bounds=bounds,
        sbest_index=[lo for lo, _ in bounds],
        clock=IterationClock(0, stage_plan.t_max),
        eval_count=0,
    )


def evaluate_state(
    state: RunState,
    objective: Objective,
    parallelism: int = 1,
    executor: ThreadPoolExecutor | None = None,
) -> np.ndarray:
    """One evaluation pass over the whole population; updates all best records."""
    fitness = _evaluate(objective, state.positions, parallelism, executor)
    _check_finite(fitness, state.positions, state.clock.t)
    state.eval_count += state.population_size
    improved = fitness < state.pbest_fitness
    state.pbest_fitness[improved] = fitness[improved]
    state.pbest_positions[improved] = state.positions[improved]
    state.sbest_index = [
        lo + int(np.argmin(state.pbest_fitness[lo:hi])) for lo, hi in state.swarm_bounds
    ]
    return fitness


def step(
    state: RunState,
    spec: ScheduleSpec,
    objective: Objective,
    parallelism: int = 1,
    executor: ThreadPoolExecutor | None = None,
) -> tuple[RunState, IterationRecord]:
    """Advance every swarm one iteration and append the history record.

    Attractor per swarm: its own best record while multiple swarms exist,
    the population best once a single swarm remains (the two coincide at
    that point by construction).
    """
    if state.clock.t >= state.clock.t_max:
        raise ConfigurationError(f"run already complete at t={state.clock.t}")
    t = state.clock.t
    omega, c1, c2 = coefficients_at(spec, state.clock)
    vmax = state.space.velocity_max
    for j, (lo, hi) in enumerate(state.swarm_bounds):
        attractor = state.pbest_positions[state.sbest_index[j]].copy()
        state.velocities[lo:hi] = velocity_block(
            state.positions[lo:hi],
            state.velocities[lo:hi],
            state.pbest_positions[lo:hi],
            attractor,
            omega,
            c1,
            c2,
            vmax,
            state.seed,
            t,
            lo,
        )
        advance_block(state.positions[lo:hi], state.velocities[lo:hi], state.space.lower, state.space.upper)
    fitness = evaluate_state(state, objective, parallelism, executor)
    state.clock = IterationClock(t + 1, state.clock.t_max)
    record = IterationRecord(
        t=t,
        gbest_fitness=state.gbest_fitness,
        sbest_fitness=tuple(state.sbest_fitness),
        coefficients=(omega, c1, c2),
        particle_fitness=tuple(float(f) for f in fitness),
    )
    return state, record


def collapse_state(state: RunState, target_count: int) -> RunState:
    """Merge adjacent swarm blocks in place down to ``target_count``."""
    current = state.swarm_count
    if target_count < 1 or current % target_count != 0:
        raise ConfigurationError(
            f"cannot collapse {current} swarms into {target_count}: not a divisor"
        )
    group = current // target_count
    bounds = [
        (state.swarm_bounds[j * group][0], state.swarm_bounds[(j + 1) * group - 1][1])
        for j in range(target_count)
    ]
    state.swarm_bounds = bounds
    state.sbest_index = [
        lo + int(np.argmin(state.pbest_fitness[lo:hi])) for lo, hi in bounds
    ]
    return state


def run(
    space: SearchSpace,
    objective: Objective,
    population_size: int,
    stage_plan: StagePlan,
    schedule_spec: ScheduleSpec,
    seed: int,
    *,
    parallelism: int = 1,
    record_particle_fitness: bool = False,
    config_digest: str = "",
    meta: dict | None = None,
    on_record: Callable[[IterationRecord], None] | None = None,
) -> RunHistory:
    """Full optimization run: init pass, staged iterations, complete history.

    Total evaluations are exactly ``population_size * (t_max + 1)``: one
    initialization pass plus one per iteration. ``on_record`` (if given)
    sees each iteration record as soon as it exists, so callers can flush
    partial history before a failing evaluation aborts the run.
    """
    state = init_state(space, population_size, stage_plan, seed)
    if not config_digest:
        config_digest = config_digest_for(
            {
                "space": {
                    "dimension": space.dimension,
                    "lower": space.lower.tolist(),
                    "upper": space.upper.tolist(),
                },
                "population_size": population_size,
                "stage_plan": list(stage_plan.stages),
                "schedule": asdict(schedule_spec),
            }
        )
    records: list[IterationRecord] = []
    executor = ThreadPoolExecutor(max_workers=parallelism) if parallelism > 1 else None
    try:
        evaluate_state(state, objective, parallelism, executor)
        t_max = stage_plan.t_max
        for t in range(t_max):
            target = stage_plan.swarm_count_at(t)
            if target != state.swarm_count:
                collapse_state(state, target)
            state, record = step(state, spec=schedule_spec, objective=objective,
                                 parallelism=parallelism, executor=executor)
            if not record_particle_fitness:
                record = IterationRecord(
                    record.t, record.gbest_fitness, record.sbest_fitness, record.coefficients
                )
            records.append(record)
            if on_record is not None:
                on_record(record)
    finally:
        if executor is not None:
            executor.shutdown(wait=True)
    assert state.eval_count == population_size * (stage_plan.t_max + 1)
    return RunHistory(
        records=records,
        gbest_position=state.gbest_position,
        gbest_fitness=state.gbest_fitness,
        eval_count=state.eval_count,
        seed=seed,
        config_digest=config_digest,
        meta=dict(meta or {}),
    )
