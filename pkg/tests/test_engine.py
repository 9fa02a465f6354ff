"""Engine: stage plans, the step kernel, bookkeeping, and full-run contracts."""

import math

import numpy as np
import pytest

from swarmstage import (
    ConfigurationError,
    EvaluationError,
    IterationClock,
    Particle,
    ScheduleSpec,
    SearchSpace,
    StagePlan,
    Swarm,
    run,
)
from swarmstage.engine import (
    RunState,
    evaluate_and_update_bests,
    evaluate_state,
    init_state,
    position_update,
    step,
    velocity_update,
)
from swarmstage.rng import RngStreamKey, uniform_block

from reference_pso import reference_run

MS2PSO_PLAN = StagePlan(((8, 25), (4, 25), (2, 25), (1, 50)))


def sphere(x):
    return np.sum(x * x, axis=1)


def bimodal(x):
    # two separated basins at -3 and +3
    return np.minimum((x[:, 0] - 3.0) ** 2, (x[:, 0] + 3.0) ** 2)


class TestStagePlan:
    def test_t_max_sums_stage_iterations(self):
        assert MS2PSO_PLAN.t_max == 125
        assert StagePlan.single_stage(125).t_max == 125

    def test_rejects_empty(self):
        with pytest.raises(ConfigurationError, match="at least one stage"):
            StagePlan(())

    def test_rejects_increasing_count(self):
        with pytest.raises(ConfigurationError, match="exceeds previous"):
            StagePlan(((2, 5), (4, 5), (1, 5)))

    def test_rejects_non_divisor_chain(self):
        with pytest.raises(ConfigurationError, match="does not divide previous"):
            StagePlan(((6, 5), (4, 5), (1, 5)))

    def test_rejects_final_multi_swarm(self):
        with pytest.raises(ConfigurationError, match="final stage"):
            StagePlan(((4, 5), (2, 5)))

    def test_rejects_zero_iterations(self):
        with pytest.raises(ConfigurationError, match="iterations"):
            StagePlan(((1, 0),))

    def test_swarm_count_at_boundaries(self):
        expected = [(0, 8), (24, 8), (25, 4), (49, 4), (50, 2), (74, 2), (75, 1), (124, 1)]
        for t, count in expected:
            assert MS2PSO_PLAN.swarm_count_at(t) == count

    def test_population_divisibility(self):
        MS2PSO_PLAN.validate_population(40)
        with pytest.raises(ConfigurationError, match="not divisible"):
            MS2PSO_PLAN.validate_population(41)


class TestVelocityUpdate:
    def test_pure_inertia(self):
        p = Particle(np.array([0.5]), np.array([0.3]), np.array([0.7]))
        key = RngStreamKey(1, 0, 0, 0, 0)
        v = velocity_update(p, np.array([0.9]), omega=1.0, c1=0.0, c2=0.0, key_base=key)
        assert v[0] == 0.3

    def test_difference_terms_vanish_at_consensus(self):
        x = np.array([0.4, -0.2])
        p = Particle(x.copy(), np.array([0.1, -0.3]), x.copy())
        key = RngStreamKey(7, 2, 5, 0, 0)
        v = velocity_update(p, x.copy(), omega=0.5, c1=2.0, c2=2.0, key_base=key)
        np.testing.assert_array_equal(v, [0.05, -0.15])

    def test_hand_computed_with_injected_draws(self):
        p = Particle(np.array([0.5]), np.array([0.1]), np.array([0.7]))
        v = velocity_update(
            p, np.array([0.9]), omega=0.5, c1=2.0, c2=2.0,
            r1=np.array([0.5]), r2=np.array([0.25]),
        )
        # 0.5*0.1 + 2*0.5*(0.7-0.5) + 2*0.25*(0.9-0.5) = 0.45
        assert v[0] == pytest.approx(0.45, abs=1e-12)

    def test_clamped_to_vmax(self):
        p = Particle(np.array([0.0]), np.array([0.0]), np.array([10.0]))
        v = velocity_update(
            p, np.array([10.0]), omega=0.0, c1=2.0, c2=2.0,
            vmax=np.array([1.5]), r1=np.array([1.0]), r2=np.array([1.0]),
        )
        assert v[0] == 1.5

    def test_keyed_draws_match_block_stream(self):
        seed, t, gidx = 11, 4, 9
        p = Particle(np.array([0.2, 0.8]), np.array([0.05, -0.1]), np.array([0.6, 0.3]))
        attractor = np.array([0.9, 0.1])
        key = RngStreamKey(seed, t, gidx, 0, 0)
        got = velocity_update(p, attractor, 0.7, 1.5, 1.5, key_base=key)
        r1 = uniform_block(seed, t, gidx, 1, 2, 0)[0]
        r2 = uniform_block(seed, t, gidx, 1, 2, 1)[0]
        want = 0.7 * p.velocity + 1.5 * r1 * (p.pbest_position - p.position) \
            + 1.5 * r2 * (attractor - p.position)
        np.testing.assert_array_equal(got, want)

    def test_rejects_attractor_shape_mismatch(self):
        p = Particle(np.zeros(2), np.zeros(2), np.zeros(2))
        with pytest.raises(ValueError, match="attractor shape"):
            velocity_update(p, np.zeros(3), 0.5, 1.0, 1.0, key_base=RngStreamKey(0, 0, 0, 0, 0))

    def test_rejects_half_injected_draws(self):
        p = Particle(np.zeros(1), np.zeros(1), np.zeros(1))
        with pytest.raises(ValueError, match="both r1 and r2"):
            velocity_update(p, np.zeros(1), 0.5, 1.0, 1.0, r1=np.array([0.5]))


class TestPositionUpdate:
    SPACE = SearchSpace.box(1, 0.0, 1.0)

    def test_adds_velocity(self):
        p = Particle(np.array([0.2]), np.array([0.1]), np.array([0.2]))
        q = position_update(p, self.SPACE)
        assert q.position[0] == pytest.approx(0.3)

    def test_clamps_and_zeroes_velocity(self):
        p = Particle(np.array([0.95]), np.array([0.2]), np.array([0.95]))
        q = position_update(p, self.SPACE)
        assert q.position[0] == 1.0
        assert q.velocity[0] == 0.0

    def test_zero_velocity_is_identity(self):
        p = Particle(np.array([0.4]), np.array([0.0]), np.array([0.4]))
        q = position_update(p, self.SPACE)
        assert q.position[0] == 0.4


class TestEvaluateAndUpdateBests:
    CLOCK = IterationClock(0, 10)

    def make_swarm(self, rows, pbest_fitness=None):
        particles = []
        for i, row in enumerate(rows):
            pos = np.asarray(row, dtype=float)
            f = math.inf if pbest_fitness is None else pbest_fitness[i]
            particles.append(Particle(pos, np.zeros_like(pos), pos.copy(), f))
        return Swarm.from_particles(0, particles)

    def test_strict_improvement_keeps_incumbent(self):
        s = self.make_swarm([[1.0], [2.0]], pbest_fitness=[1.0, 4.0])
        out = evaluate_and_update_bests(s, sphere, self.CLOCK)
        assert [p.pbest_fitness for p in out.particles] == [1.0, 4.0]
        assert out.sbest_fitness == 1.0

    def test_improvement_adopts_new_best(self):
        s = self.make_swarm([[0.5], [3.0]], pbest_fitness=[9.0, 9.0])
        out = evaluate_and_update_bests(s, sphere, self.CLOCK)
        assert out.particles[0].pbest_fitness == 0.25
        assert out.sbest_fitness == 0.25
        assert out.sbest_position[0] == 0.5

    def test_tie_goes_to_lowest_index(self):
        s = self.make_swarm([[2.0], [-2.0]])
        out = evaluate_and_update_bests(s, sphere, self.CLOCK)
        assert out.sbest_fitness == 4.0
        assert out.sbest_position[0] == 2.0

    def test_non_finite_fitness_aborts_with_diagnostic(self):
        def bad(x):
            return np.full(x.shape[0], np.nan)

        s = self.make_swarm([[0.25], [0.75]])
        with pytest.raises(EvaluationError, match="particle 0") as err:
            evaluate_and_update_bests(s, bad, self.CLOCK)
        assert "0.25" in str(err.value)


class TestStep:
    def test_rejects_completed_run(self):
        space = SearchSpace.box(1, -1.0, 1.0)
        state = init_state(space, 4, StagePlan.single_stage(1), seed=0)
        evaluate_state(state, sphere)
        step(state, ScheduleSpec.constant(), sphere)
        with pytest.raises(ConfigurationError, match="already complete"):
            step(state, ScheduleSpec.constant(), sphere)

    def test_gbest_never_regresses(self):
        space = SearchSpace.box(3, -5.0, 5.0)
        state = init_state(space, 8, StagePlan(((2, 6), (1, 6))), seed=5)
        evaluate_state(state, sphere)
        prev = state.gbest_fitness
        for _ in range(6):
            state, record = step(state, ScheduleSpec.constant(), sphere)
            assert record.gbest_fitness <= prev
            prev = record.gbest_fitness

    def test_gbest_is_min_of_swarm_bests(self):
        space = SearchSpace.box(1, -5.0, 5.0)
        state = init_state(space, 8, StagePlan(((2, 8), (1, 2))), seed=3)
        evaluate_state(state, bimodal)
        for _ in range(8):
            state, record = step(state, ScheduleSpec.constant(), bimodal)
            assert len(record.sbest_fitness) == 2
            assert record.gbest_fitness == min(record.sbest_fitness)

    def test_swarm_bests_improve_independently(self):
        space = SearchSpace.box(1, -5.0, 5.0)
        state = init_state(space, 8, StagePlan(((2, 8), (1, 2))), seed=3)
        evaluate_state(state, bimodal)
        prev = list(state.sbest_fitness)
        for _ in range(8):
            state, record = step(state, ScheduleSpec.constant(), bimodal)
            assert record.sbest_fitness[0] <= prev[0]
            assert record.sbest_fitness[1] <= prev[1]
            prev = list(record.sbest_fitness)


class TestReductionToCanonical:
    def test_matches_reference_iteration_by_iteration(self):
        pop, t_max, seed = 10, 10, 21
        lower, upper = [-5.0, -5.0], [5.0, 5.0]
        space = SearchSpace(2, np.array(lower), np.array(upper))

        def scalar_sphere(p):
            return p[0] * p[0] + p[1] * p[1]

        snapshots = reference_run(
            lower, upper, scalar_sphere, pop, t_max, seed,
            omega=0.729, c1=1.49445, c2=1.49445,
        )
        state = init_state(space, pop, StagePlan.single_stage(t_max), seed)
        evaluate_state(state, sphere)
        spec = ScheduleSpec.constant(0.729, 1.49445, 1.49445)
        for t in range(t_max):
            state, record = step(state, spec, sphere)
            ref_pos, ref_vel, ref_pbest_fit, ref_best = snapshots[t]
            np.testing.assert_array_equal(state.positions, np.array(ref_pos))
            np.testing.assert_array_equal(state.velocities, np.array(ref_vel))
            np.testing.assert_array_equal(state.pbest_fitness, np.array(ref_pbest_fit))
            assert record.gbest_fitness == ref_best


class TestSwarmIsolation:
    def test_first_swarm_unaffected_by_second(self):
        space = SearchSpace.box(2, -4.0, 4.0)
        n, steps, seed = 5, 4, 13
        solo = init_state(space, n, StagePlan(((1, 8),)), seed)
        both = init_state(space, 2 * n, StagePlan(((2, 4), (1, 4))), seed)
        evaluate_state(solo, sphere)
        evaluate_state(both, sphere)
        np.testing.assert_array_equal(both.positions[:n], solo.positions)
        spec = ScheduleSpec.constant()
        for _ in range(steps):
            solo, _ = step(solo, spec, sphere)
            both, _ = step(both, spec, sphere)
            np.testing.assert_array_equal(both.positions[:n], solo.positions)
            np.testing.assert_array_equal(both.velocities[:n], solo.velocities)
            np.testing.assert_array_equal(both.pbest_fitness[:n], solo.pbest_fitness)


class TestRunStateProperties:
    def test_gbest_tie_breaks_to_lowest_index(self):
        space = SearchSpace.box(1, 0.0, 1.0)
        pos = np.array([[0.1], [0.2], [0.3], [0.4]])
        state = RunState(
            space=space,
            seed=0,
            positions=pos.copy(),
            velocities=np.zeros_like(pos),
            pbest_positions=pos.copy(),
            pbest_fitness=np.array([5.0, 2.0, 2.0, 7.0]),
            swarm_bounds=[(0, 2), (2, 4)],
            sbest_index=[1, 2],
            clock=IterationClock(0, 1),
            eval_count=0,
        )
        assert state.gbest_index == 1
        assert state.gbest_fitness == 2.0
        assert state.gbest_position[0] == 0.2
        assert state.sbest_fitness == [2.0, 2.0]


class TestRun:
    def test_budget_exactness(self):
        space = SearchSpace.box(2, -1.0, 1.0)
        plan = StagePlan(((3, 2), (1, 3)))
        hist = run(space, sphere, 12, plan, ScheduleSpec.constant(), seed=1)
        assert hist.eval_count == 12 * (plan.t_max + 1)

    def test_record_layout(self):
        space = SearchSpace.box(2, -1.0, 1.0)
        plan = StagePlan(((2, 3), (1, 2)))
        hist = run(space, sphere, 8, plan, ScheduleSpec.constant(0.7, 1.4, 1.4), seed=2)
        assert [r.t for r in hist.records] == [0, 1, 2, 3, 4]
        assert [len(r.sbest_fitness) for r in hist.records] == [2, 2, 2, 1, 1]
        assert all(r.coefficients == (0.7, 1.4, 1.4) for r in hist.records)
        assert all(r.particle_fitness is None for r in hist.records)

    def test_particle_fitness_recording_is_opt_in(self):
        space = SearchSpace.box(2, -1.0, 1.0)
        hist = run(
            space, sphere, 4, StagePlan.single_stage(3), ScheduleSpec.constant(),
            seed=2, record_particle_fitness=True,
        )
        assert all(len(r.particle_fitness) == 4 for r in hist.records)

    def test_gbest_monotone_across_stage_boundaries(self):
        space = SearchSpace.box(3, -5.12, 5.12)

        def rastrigin(x):
            return 10.0 * x.shape[1] + np.sum(x * x - 10.0 * np.cos(2 * np.pi * x), axis=1)

        plan = StagePlan(((4, 3), (2, 3), (1, 4)))
        hist = run(space, rastrigin, 8, plan, ScheduleSpec.tvac(), seed=9)
        best = [r.gbest_fitness for r in hist.records]
        assert all(a >= b for a, b in zip(best, best[1:]))
        assert hist.gbest_fitness == best[-1]

    def test_seeded_replay_bit_identical(self):
        space = SearchSpace.box(3, -2.0, 2.0)
        plan = StagePlan(((2, 4), (1, 4)))
        a = run(space, sphere, 6, plan, ScheduleSpec.ldiw(), seed=17)
        b = run(space, sphere, 6, plan, ScheduleSpec.ldiw(), seed=17)
        assert a.records == b.records
        np.testing.assert_array_equal(a.gbest_position, b.gbest_position)
        assert a.gbest_fitness == b.gbest_fitness

    def test_parallel_evaluation_does_not_change_results(self):
        space = SearchSpace.box(3, -2.0, 2.0)
        plan = StagePlan(((2, 4), (1, 4)))
        serial = run(space, sphere, 6, plan, ScheduleSpec.constant(), seed=17)
        threaded = run(space, sphere, 6, plan, ScheduleSpec.constant(), seed=17, parallelism=4)
        assert serial.records == threaded.records
        np.testing.assert_array_equal(serial.gbest_position, threaded.gbest_position)

    def test_evaluation_failure_flushes_partial_history(self):
        space = SearchSpace.box(1, -1.0, 1.0)
        calls = {"n": 0}

        def poisoned(x):
            calls["n"] += 1
            out = np.sum(x * x, axis=1)
            if calls["n"] == 4:  # init + iterations 0,1 succeed, fails at t=2
                out[2] = np.nan
            return out

        seen = []
        with pytest.raises(EvaluationError, match="particle 2"):
            run(
                space, poisoned, 4, StagePlan.single_stage(6), ScheduleSpec.constant(),
                seed=3, on_record=seen.append,
            )
        assert [r.t for r in seen] == [0, 1]

    def test_population_must_divide_into_stage_one(self):
        space = SearchSpace.box(1, -1.0, 1.0)
        with pytest.raises(ConfigurationError, match="not divisible"):
            run(space, sphere, 7, StagePlan(((2, 2), (1, 2))), ScheduleSpec.constant(), seed=0)
