"""Benchmark functions, the production cost aggregation, and objective specs."""

import math
from types import SimpleNamespace

import numpy as np
import pytest

from swarmstage import (
    BENCHMARK_NAMES,
    ConfigurationError,
    EvaluationError,
    ObjectiveSpec,
    ProductionTotals,
    eval_benchmark,
    get_objective,
    wcf,
)


class TestWcf:
    def test_oil_minus_weighted_water(self):
        assert wcf(ProductionTotals(10.0, 5.0, 5.0)) == 9.0

    def test_zero_case(self):
        assert wcf(ProductionTotals(0.0, 0.0, 0.0)) == 0.0

    def test_water_only_penalty(self):
        assert wcf(ProductionTotals(0.0, 10.0, 0.0)) == -1.0

    def test_custom_weight(self):
        assert wcf(ProductionTotals(10.0, 5.0, 5.0), weight_water=0.5) == 5.0

    def test_rejects_non_finite_totals(self):
        fake = SimpleNamespace(q_op=math.nan, q_wp=0.0, q_wi=0.0)
        with pytest.raises(EvaluationError, match="q_op"):
            wcf(fake)


# scalar textbook forms, written independently of the vectorized package code
def scalar_reference(name, x):
    n = len(x)
    if name == "sphere":
        return sum(v * v for v in x)
    if name == "rastrigin":
        return 10.0 * n + sum(v * v - 10.0 * math.cos(2 * math.pi * v) for v in x)
    if name == "rosenbrock":
        return sum(
            100.0 * (x[i + 1] - x[i] ** 2) ** 2 + (1.0 - x[i]) ** 2 for i in range(n - 1)
        )
    if name == "ackley":
        rms = math.sqrt(sum(v * v for v in x) / n)
        mean_cos = sum(math.cos(2 * math.pi * v) for v in x) / n
        return -20.0 * math.exp(-0.2 * rms) - math.exp(mean_cos) + 20.0 + math.e
    if name == "griewank":
        prod = 1.0
        for i, v in enumerate(x):
            prod *= math.cos(v / math.sqrt(i + 1))
        return 1.0 + sum(v * v for v in x) / 4000.0 - prod
    raise AssertionError(name)


class TestBenchmarks:
    def test_name_listing(self):
        assert BENCHMARK_NAMES == ("ackley", "griewank", "rastrigin", "rosenbrock", "sphere")

    def test_sphere_zero_at_origin(self):
        for dim in (1, 3, 10):
            assert eval_benchmark("sphere", np.zeros(dim)) == 0.0

    def test_rastrigin_zero_at_origin(self):
        assert eval_benchmark("rastrigin", np.zeros(10)) == 0.0

    def test_rosenbrock_zero_at_ones(self):
        assert eval_benchmark("rosenbrock", np.ones(10)) == 0.0

    def test_transcendental_optima_within_tolerance(self):
        assert abs(eval_benchmark("ackley", np.zeros(10))) <= 1e-12
        assert abs(eval_benchmark("griewank", np.zeros(10))) <= 1e-12

    def test_unknown_name_rejected(self):
        with pytest.raises(ConfigurationError, match="sphere"):
            eval_benchmark("parabola", np.zeros(2))

    def test_matches_scalar_reference(self):
        rng = np.random.default_rng(8)
        for name in BENCHMARK_NAMES:
            dim = 6
            block = rng.uniform(-4.0, 4.0, (20, dim))
            for row in block:
                got = eval_benchmark(name, row)
                want = scalar_reference(name, list(row))
                assert got == pytest.approx(want, rel=1e-12, abs=1e-12), name

    def test_purity(self):
        x = np.linspace(-3.0, 3.0, 10)
        for name in BENCHMARK_NAMES:
            assert eval_benchmark(name, x) == eval_benchmark(name, x)


class TestGetObjective:
    def test_benchmark_spec_fields(self):
        spec = get_objective("rastrigin", 10)
        assert spec.sense == "minimize"
        assert spec.dimension == 10
        assert spec.space.dimension == 10
        assert spec.known_optimum == 0.0
        np.testing.assert_array_equal(spec.optimum_position, np.zeros(10))
        np.testing.assert_array_equal(spec.space.lower, np.full(10, -5.12))

    def test_optimum_position_achieves_known_optimum(self):
        for name in BENCHMARK_NAMES:
            spec = get_objective(name, 4)
            val = eval_benchmark(name, spec.optimum_position)
            assert abs(val - spec.known_optimum) <= 1e-12

    def test_minimum_dimension_enforced(self):
        with pytest.raises(ConfigurationError, match="dimension >= 2"):
            get_objective("rosenbrock", 1)

    def test_unknown_name_lists_choices(self):
        with pytest.raises(ConfigurationError, match="well_proxy"):
            get_objective("olympus", 90)

    def test_well_proxy_dimension_pinned(self):
        spec = get_objective("well_proxy", 90)
        assert spec.sense == "maximize"
        assert spec.dimension == 90
        with pytest.raises(ConfigurationError, match="90"):
            get_objective("well_proxy", 30)

    def test_maximize_sense_negates_for_engine(self):
        spec = get_objective("well_proxy", 90)
        block = np.full((1, 90), 0.5)
        engine_val = spec(block)[0]
        assert spec.raw_value(engine_val) == -engine_val

    def test_minimize_sense_passes_through(self):
        spec = get_objective("sphere", 3)
        block = np.array([[1.0, 2.0, 2.0]])
        assert spec(block)[0] == 9.0
        assert spec.raw_value(9.0) == 9.0

    def test_batch_evaluation_matches_single(self):
        spec = get_objective("ackley", 5)
        rng = np.random.default_rng(3)
        block = rng.uniform(-10.0, 10.0, (7, 5))
        vals = spec(block)
        for i, row in enumerate(block):
            assert vals[i] == eval_benchmark("ackley", row)


class TestObjectiveSpecValidation:
    def test_rejects_sense_typo(self):
        good = get_objective("sphere", 2)
        with pytest.raises(ConfigurationError, match="sense"):
            ObjectiveSpec(
                name="sphere", dimension=2, space=good.space,
                sense="max", batch=good.batch,
            )

    def test_rejects_space_dimension_mismatch(self):
        good = get_objective("sphere", 3)
        with pytest.raises(ConfigurationError, match="dimension"):
            ObjectiveSpec(
                name="sphere", dimension=2, space=good.space,
                sense="minimize", batch=good.batch,
            )
