"""Staged multi-swarm particle swarm optimization with reproducible runs."""

from ._backend import BACKEND, HAVE_NUMBA
from .core import (
    UNEVALUATED,
    Particle,
    ProductionTotals,
    SearchSpace,
    Swarm,
    clamp_to_bounds,
    init_population,
)
from .engine import (
    IterationRecord,
    RunHistory,
    RunState,
    StagePlan,
    collapse_swarms,
    config_digest_for,
    evaluate_and_update_bests,
    init_state,
    position_update,
    run,
    step,
    velocity_update,
)
from .errors import ConfigurationError, EvaluationError, SwarmstageError
from .harness import (
    ExperimentConfig,
    RunResult,
    RunSummary,
    emit_plot_data,
    load_config,
    read_history,
    run_experiment,
    summarize,
    write_config,
)
from .objectives import (
    BENCHMARK_NAMES,
    SENSE_MAXIMIZE,
    SENSE_MINIMIZE,
    ObjectiveSpec,
    eval_benchmark,
    get_objective,
    wcf,
)
from .presets import ALGORITHM_NAMES, preset, preset_schedule, preset_stage_plan
from .rng import RngStreamKey, draw_uniform, uniform_block
from .schedules import (
    IterationClock,
    ScheduleSpec,
    coefficients_at,
    ldiw_weight,
    tvac_coeffs,
)
from .well_proxy import (
    ProxyParams,
    WellProxyConfig,
    load_fixture,
    production_totals,
    well_proxy_eval,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHM_NAMES",
    "BACKEND",
    "BENCHMARK_NAMES",
    "ConfigurationError",
    "EvaluationError",
    "ExperimentConfig",
    "HAVE_NUMBA",
    "IterationClock",
    "IterationRecord",
    "ObjectiveSpec",
    "Particle",
    "ProductionTotals",
    "ProxyParams",
    "RngStreamKey",
    "RunHistory",
    "RunResult",
    "RunState",
    "RunSummary",
    "ScheduleSpec",
    "SearchSpace",
    "StagePlan",
    "Swarm",
    "SwarmstageError",
    "SENSE_MAXIMIZE",
    "SENSE_MINIMIZE",
    "UNEVALUATED",
    "WellProxyConfig",
    "clamp_to_bounds",
    "coefficients_at",
    "collapse_swarms",
    "config_digest_for",
    "draw_uniform",
    "emit_plot_data",
    "eval_benchmark",
    "evaluate_and_update_bests",
    "get_objective",
    "init_population",
    "init_state",
    "ldiw_weight",
    "load_config",
    "load_fixture",
    "position_update",
    "preset",
    "preset_schedule",
    "preset_stage_plan",
    "production_totals",
    "read_history",
    "run",
    "run_experiment",
    "step",
    "summarize",
    "tvac_coeffs",
    "uniform_block",
    "velocity_update",
    "wcf",
    "well_proxy_eval",
    "write_config",
]
