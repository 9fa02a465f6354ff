"""Experiment configuration, batch running, and result files.

An experiment is one algorithm on one objective, repeated across seeds.  Each
seed produces a JSON-lines history file (a header record, one record per
iteration, and a final record); the batch produces a summary JSON and a
plot-ready convergence CSV.  History files contain no timing information, so
rerunning a seed reproduces its file byte for byte; wall-clock measurements
live only in the summary.

Fitness values inside history files are engine-sense (lower is better, with
maximize objectives negated).  Summaries and plot data report raw-sense
values, converted using the sense recorded in each history header.
"""

from __future__ import annotations

import json
import os
import statistics
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path
from time import perf_counter
from typing import Callable

from .engine import RunHistory, StagePlan, config_digest_for, run
from .errors import ConfigurationError, EvaluationError
from .objectives import SENSE_MINIMIZE, get_objective
from .presets import (
    ALGORITHM_NAMES,
    DEFAULT_POPULATION,
    DEFAULT_SEEDS,
    DEFAULT_T_MAX,
    preset_schedule,
    preset_stage_plan,
)
from .schedules import ScheduleSpec

FORMAT_VERSION = 1
SUMMARY_NAME = "summary.json"
PLOT_NAME = "convergence.csv"

_SINGLE_STAGE = ("canonical", "ldiw", "tvac")
_TWO_STAGE = ("2spso", "tvac-2spso")

_SEED_LIMIT = 2**64


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment description.

    Construction checks every field and raises :class:`ConfigurationError`
    listing all violations at once.
    """

    objective: str
    algorithm: str
    dimension: int
    population_size: int
    t_max: int
    seeds: tuple[int, ...]
    output_dir: str
    parallelism: int | str = 1
    schedule: ScheduleSpec | None = None
    stage_plan: StagePlan | None = None
    record_particle_fitness: bool = False

    def __post_init__(self) -> None:
        problems = []
        if self.algorithm not in ALGORITHM_NAMES:
            problems.append(
                f"algorithm: unknown name {self.algorithm!r}; "
                f"expected one of {', '.join(ALGORITHM_NAMES)}"
            )
        if self.t_max < 1:
            problems.append(f"t_max: must be positive, got {self.t_max}")
        if self.population_size < 1:
            problems.append(f"population_size: must be positive, got {self.population_size}")

        if self.schedule is None and self.algorithm in ALGORITHM_NAMES:
            object.__setattr__(self, "schedule", preset_schedule(self.algorithm))
        if self.stage_plan is None and self.algorithm in ALGORITHM_NAMES and self.t_max >= 1:
            try:
                object.__setattr__(self, "stage_plan", preset_stage_plan(self.algorithm, self.t_max))
            except ConfigurationError as exc:
                problems.extend(f"stage_plan: {m}" for m in exc.messages)

        try:
            get_objective(self.objective, self.dimension)
        except ConfigurationError as exc:
            problems.extend(f"objective: {m}" for m in exc.messages)

        plan = self.stage_plan
        if plan is not None:
            if plan.t_max != self.t_max:
                problems.append(
                    f"stage_plan: iterations total {plan.t_max}, t_max declares {self.t_max}"
                )
            try:
                plan.validate_population(self.population_size)
            except ConfigurationError as exc:
                problems.extend(f"population_size: {m}" for m in exc.messages)
            n_stages = len(plan.stages)
            if self.algorithm in _SINGLE_STAGE and n_stages != 1:
                problems.append(
                    f"algorithm/stage_plan mismatch: {self.algorithm} runs a single stage, "
                    f"plan has {n_stages}"
                )
            elif self.algorithm in _TWO_STAGE and n_stages != 2:
                problems.append(
                    f"algorithm/stage_plan mismatch: {self.algorithm} runs exactly 2 stages, "
                    f"plan has {n_stages}"
                )
            elif self.algorithm == "ms2pso" and n_stages < 3:
                problems.append(
                    f"algorithm/stage_plan mismatch: ms2pso needs at least 3 stages, "
                    f"plan has {n_stages}"
                )

        if not self.seeds:
            problems.append("seeds: at least one seed is required")
        else:
            for i, seed in enumerate(self.seeds):
                if not 0 <= seed < _SEED_LIMIT:
                    problems.append(f"seeds[{i}]: must be an unsigned 64-bit value, got {seed}")
        if not self.output_dir:
            problems.append("output_dir: must be a non-empty path")
        if self.parallelism != "auto" and (
            not isinstance(self.parallelism, int) or self.parallelism < 1
        ):
            problems.append(
                f"parallelism: must be a positive integer or 'auto', got {self.parallelism!r}"
            )
        if problems:
            raise ConfigurationError(*problems)
        if len(self.seeds) < 2:
            warnings.warn(
                "experiment declares a single seed; use at least two to average out "
                "initialization luck",
                stacklevel=2,
            )


def _default_dimension(objective: str) -> int:
    return 90 if objective == "well_proxy" else 10


_PAYLOAD_KEYS = {
    "objective",
    "algorithm",
    "dimension",
    "population_size",
    "t_max",
    "seeds",
    "output_dir",
    "parallelism",
    "schedule",
    "stage_plan",
    "record_particle_fitness",
}


def config_from_payload(payload: dict) -> ExperimentConfig:
    """Build a config from parsed JSON, filling documented defaults."""
    problems = []
    if not isinstance(payload, dict):
        raise ConfigurationError(f"config root must be an object, got {type(payload).__name__}")
    for key in sorted(set(payload) - _PAYLOAD_KEYS):
        problems.append(f"{key}: unknown config key")

    def field(key, expected, default=None, required=False):
        value = payload.get(key, default)
        if value is None:
            if required:
                problems.append(f"{key}: required")
            return default
        if expected is int and isinstance(value, bool):
            problems.append(f"{key}: expected an integer, got a boolean")
            return default
        if not isinstance(value, expected):
            name = expected.__name__ if isinstance(expected, type) else "value"
            problems.append(f"{key}: expected {name}, got {type(value).__name__}")
            return default
        return value

    objective = field("objective", str, required=True)
    algorithm = field("algorithm", str, required=True)
    dimension = field("dimension", int, _default_dimension(objective or ""))
    population_size = field("population_size", int, DEFAULT_POPULATION)
    t_max = field("t_max", int, DEFAULT_T_MAX)
    output_dir = field(
        "output_dir", str, f"runs/{algorithm or 'unknown'}_{objective or 'unknown'}"
    )
    record_flag = field("record_particle_fitness", bool, False)

    seeds_raw = payload.get("seeds", list(DEFAULT_SEEDS))
    seeds: tuple[int, ...] = tuple(DEFAULT_SEEDS)
    if not isinstance(seeds_raw, list) or any(
        isinstance(s, bool) or not isinstance(s, int) for s in seeds_raw
    ):
        problems.append("seeds: expected a list of integers")
    else:
        seeds = tuple(seeds_raw)

    parallelism = payload.get("parallelism", 1)
    if parallelism != "auto" and (isinstance(parallelism, bool) or not isinstance(parallelism, int)):
        problems.append(f"parallelism: must be a positive integer or 'auto', got {parallelism!r}")
        parallelism = 1

    schedule = None
    schedule_raw = payload.get("schedule")
    if schedule_raw is not None:
        if not isinstance(schedule_raw, dict):
            problems.append("schedule: expected an object of schedule fields")
        else:
            valid = {f.name for f in ScheduleSpec.__dataclass_fields__.values()}
            unknown = sorted(set(schedule_raw) - valid)
            if unknown:
                problems.append(f"schedule: unknown fields {', '.join(unknown)}")
            else:
                try:
                    schedule = ScheduleSpec(**schedule_raw)
                except ConfigurationError as exc:
                    problems.extend(f"schedule: {m}" for m in exc.messages)

    stage_plan = None
    plan_raw = payload.get("stage_plan")
    if plan_raw is not None:
        ok = isinstance(plan_raw, list) and all(
            isinstance(row, list)
            and len(row) == 2
            and all(isinstance(v, int) and not isinstance(v, bool) for v in row)
            for row in plan_raw
        )
        if not ok:
            problems.append("stage_plan: expected a list of [swarm_count, iterations] pairs")
        else:
            try:
                stage_plan = StagePlan(tuple((c, n) for c, n in plan_raw))
            except ConfigurationError as exc:
                problems.extend(f"stage_plan: {m}" for m in exc.messages)

    if problems:
        raise ConfigurationError(*problems)
    return ExperimentConfig(
        objective=objective,
        algorithm=algorithm,
        dimension=dimension,
        population_size=population_size,
        t_max=t_max,
        seeds=seeds,
        output_dir=output_dir,
        parallelism=parallelism,
        schedule=schedule,
        stage_plan=stage_plan,
        record_particle_fitness=record_flag,
    )


def config_payload(config: ExperimentConfig) -> dict:
    """The JSON-ready form of a config; feeds files and digests."""
    return {
        "objective": config.objective,
        "algorithm": config.algorithm,
        "dimension": config.dimension,
        "population_size": config.population_size,
        "t_max": config.t_max,
        "seeds": list(config.seeds),
        "output_dir": config.output_dir,
        "parallelism": config.parallelism,
        "schedule": asdict(config.schedule),
        "stage_plan": [list(stage) for stage in config.stage_plan.stages],
        "record_particle_fitness": config.record_particle_fitness,
    }


def experiment_identity(config: ExperimentConfig) -> dict:
    """The digest-relevant payload: excludes fields that only steer execution.

    Parallelism and the output directory change neither trajectories nor
    results, so two runs differing only there share a digest and produce
    byte-identical histories.
    """
    payload = config_payload(config)
    del payload["parallelism"]
    del payload["output_dir"]
    return payload


def load_config(path: str | Path) -> ExperimentConfig:
    """Read and validate a JSON experiment config."""
    source = Path(path)
    if not source.exists():
        raise ConfigurationError(f"{source}: config file not found")
    try:
        payload = json.loads(source.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{source}: not valid JSON ({exc})") from exc
    try:
        return config_from_payload(payload)
    except ConfigurationError as exc:
        raise ConfigurationError(*(f"{source}: {m}" for m in exc.messages)) from exc


def write_config(config: ExperimentConfig, path: str | Path) -> None:
    """Write a config so that :func:`load_config` reproduces it exactly."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(
        json.dumps(config_payload(config), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


# -- run results -------------------------------------------------------------


@dataclass(frozen=True)
class RunResult:
    seed: int
    status: str  # "ok" or "failed"
    history_path: str
    final_best_raw: float | None = None
    final_best_engine: float | None = None
    best_position: tuple[float, ...] | None = None
    eval_count: int | None = None
    wall_clock_seconds: float | None = None
    error: str | None = None


@dataclass(frozen=True)
class RunSummary:
    """Aggregate of one experiment's runs.

    Final-fitness statistics are raw-sense and cover successful runs only.
    ``iteration_stats`` rows are (iteration, median, min, max) of raw-sense
    best-so-far across runs.
    """

    objective: str
    dimension: int
    algorithm: str
    sense: str
    population_size: int
    t_max: int
    config_digest: str
    runs: tuple[RunResult, ...]
    median_final: float | None
    min_final: float | None
    max_final: float | None
    wall_clock_seconds: float | None = None
    iteration_stats: tuple[tuple[int, float, float, float], ...] = ()

    @property
    def failed(self) -> bool:
        return any(r.status != "ok" for r in self.runs)


def _raw(value: float, sense: str) -> float:
    return value if sense == SENSE_MINIMIZE else -value


def _json_line(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def history_path_for(config: ExperimentConfig, seed: int) -> Path:
    return Path(config.output_dir) / f"history_seed{seed}.jsonl"


def _iteration_payload(record) -> dict:
    payload = {
        "record": "iteration",
        "t": record.t,
        "gbest": float(record.gbest_fitness),
        "sbest": [float(v) for v in record.sbest_fitness],
        "coefficients": [float(v) for v in record.coefficients],
    }
    if record.particle_fitness is not None:
        payload["particle_fitness"] = [float(v) for v in record.particle_fitness]
    return payload


def _run_one(
    config: ExperimentConfig,
    objective,
    seed: int,
    parallelism: int,
    digest: str,
    path: Path,
) -> RunHistory:
    header = {
        "record": "header",
        "format_version": FORMAT_VERSION,
        "seed": seed,
        "sense": objective.sense,
        "config_digest": digest,
        "experiment": experiment_identity(config),
    }
    with path.open("w", encoding="utf-8") as fh:
        fh.write(_json_line(header))

        def on_record(record) -> None:
            fh.write(_json_line(_iteration_payload(record)))

        try:
            history = run(
                objective.space,
                objective,
                population_size=config.population_size,
                stage_plan=config.stage_plan,
                schedule_spec=config.schedule,
                seed=seed,
                parallelism=parallelism,
                record_particle_fitness=config.record_particle_fitness,
                config_digest=digest,
                on_record=on_record,
            )
        except EvaluationError as exc:
            fh.write(_json_line({"record": "final", "status": "failed", "error": str(exc)}))
            raise
        fh.write(
            _json_line(
                {
                    "record": "final",
                    "status": "ok",
                    "gbest": float(history.gbest_fitness),
                    "gbest_position": [float(v) for v in history.gbest_position],
                    "eval_count": history.eval_count,
                }
            )
        )
    return history


def resolve_parallelism(setting: int | str) -> int:
    if setting == "auto":
        return os.cpu_count() or 1
    return int(setting)


def run_experiment(
    config: ExperimentConfig,
    force: bool = False,
    log: Callable[[str], None] | None = None,
) -> RunSummary:
    """Run every seed, writing histories, a summary, and plot data.

    Existing output files stop the run unless ``force`` is set.  A failed
    run is recorded in the summary and does not disturb the others.
    """
    say = log if log is not None else lambda message: None
    objective = get_objective(config.objective, config.dimension)
    parallelism = resolve_parallelism(config.parallelism)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    targets = [history_path_for(config, seed) for seed in config.seeds]
    targets += [out_dir / SUMMARY_NAME, out_dir / PLOT_NAME]
    existing = sorted(str(p) for p in targets if p.exists())
    if existing and not force:
        raise ConfigurationError(
            f"output files already exist ({', '.join(existing)}); pass force to overwrite"
        )

    digest = config_digest_for(experiment_identity(config))
    results = []
    best_series = []
    total_start = perf_counter()
    for seed in config.seeds:
        path = history_path_for(config, seed)
        start = perf_counter()
        try:
            history = _run_one(config, objective, seed, parallelism, digest, path)
        except EvaluationError as exc:
            say(f"seed {seed}: failed ({exc})")
            results.append(
                RunResult(seed=seed, status="failed", history_path=str(path), error=str(exc))
            )
            continue
        wall = perf_counter() - start
        best_series.append([objective.raw_value(r.gbest_fitness) for r in history.records])
        raw_best = objective.raw_value(history.gbest_fitness)
        say(
            f"seed {seed}: best {raw_best:.6g} after {history.eval_count} evaluations "
            f"({wall:.2f}s)"
        )
        results.append(
            RunResult(
                seed=seed,
                status="ok",
                history_path=str(path),
                final_best_raw=raw_best,
                final_best_engine=history.gbest_fitness,
                best_position=tuple(float(v) for v in history.gbest_position),
                eval_count=history.eval_count,
                wall_clock_seconds=wall,
            )
        )

    finals = [r.final_best_raw for r in results if r.status == "ok"]
    iteration_stats = tuple(
        (t + 1, statistics.median(values), min(values), max(values))
        for t, values in enumerate(zip(*best_series))
    )
    summary = RunSummary(
        objective=config.objective,
        dimension=config.dimension,
        algorithm=config.algorithm,
        sense=objective.sense,
        population_size=config.population_size,
        t_max=config.t_max,
        config_digest=digest,
        runs=tuple(results),
        median_final=statistics.median(finals) if finals else None,
        min_final=min(finals) if finals else None,
        max_final=max(finals) if finals else None,
        wall_clock_seconds=perf_counter() - total_start,
        iteration_stats=iteration_stats,
    )
    write_summary(summary, out_dir / SUMMARY_NAME)
    ok_paths = [r.history_path for r in results if r.status == "ok"]
    if ok_paths:
        emit_plot_data(ok_paths, out_dir / PLOT_NAME)
    return summary


def summary_payload(summary: RunSummary) -> dict:
    payload = asdict(summary)
    payload["format_version"] = FORMAT_VERSION
    payload["runs"] = [asdict(r) for r in summary.runs]
    payload["iteration_stats"] = [list(row) for row in summary.iteration_stats]
    return payload


def write_summary(summary: RunSummary, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(summary_payload(summary), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


# -- history files -----------------------------------------------------------


@dataclass(frozen=True)
class HistoryFile:
    path: str
    header: dict
    iterations: tuple[dict, ...]
    final: dict

    @property
    def seed(self) -> int:
        return self.header["seed"]

    @property
    def sense(self) -> str:
        return self.header["sense"]

    @property
    def experiment(self) -> dict:
        return self.header["experiment"]


def read_history(path: str | Path) -> HistoryFile:
    """Parse one JSONL history file, checking its structural envelope."""
    source = Path(path)
    if not source.exists():
        raise ConfigurationError(f"{source}: history file not found")
    records = []
    for lineno, line in enumerate(source.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{source}:{lineno}: invalid history line ({exc})") from exc
    if not records or records[0].get("record") != "header":
        raise ConfigurationError(f"{source}: missing header record")
    if records[-1].get("record") != "final":
        raise ConfigurationError(f"{source}: missing final record (truncated run?)")
    header, final = records[0], records[-1]
    iterations = tuple(r for r in records[1:-1] if r.get("record") == "iteration")
    if len(iterations) != len(records) - 2:
        raise ConfigurationError(f"{source}: unexpected record types between header and final")
    expected_t = header.get("experiment", {}).get("t_max")
    if final.get("status") == "ok" and expected_t is not None and len(iterations) != expected_t:
        raise ConfigurationError(
            f"{source}: {len(iterations)} iteration records, header declares t_max={expected_t}"
        )
    return HistoryFile(path=str(source), header=header, iterations=iterations, final=final)


_MATCH_FIELDS = ("objective", "dimension", "t_max")


def _check_histories_match(histories: list[HistoryFile]) -> None:
    first = histories[0]
    mismatched = []
    for other in histories[1:]:
        for key in _MATCH_FIELDS:
            if other.experiment.get(key) != first.experiment.get(key):
                mismatched.append(
                    f"{key}: {first.path} has {first.experiment.get(key)!r}, "
                    f"{other.path} has {other.experiment.get(key)!r}"
                )
        if other.sense != first.sense:
            mismatched.append(f"sense: {first.sense!r} vs {other.sense!r} in {other.path}")
    if mismatched:
        raise ConfigurationError(*mismatched)


def summarize(history_paths: list) -> RunSummary:
    """Recompute statistics from stored histories.

    Produces a cross-run iteration table (median/min/max of raw-sense
    best-so-far) plus final statistics.  Wall-clock is unknown here because
    histories do not store timing.
    """
    if not history_paths:
        raise ConfigurationError("no history files given")
    histories = [read_history(p) for p in history_paths]
    _check_histories_match(histories)
    first = histories[0]
    sense = first.sense
    results = []
    for h in histories:
        if h.final.get("status") == "ok":
            engine_best = float(h.final["gbest"])
            results.append(
                RunResult(
                    seed=h.seed,
                    status="ok",
                    history_path=h.path,
                    final_best_raw=_raw(engine_best, sense),
                    final_best_engine=engine_best,
                    best_position=tuple(float(v) for v in h.final["gbest_position"]),
                    eval_count=int(h.final["eval_count"]),
                )
            )
        else:
            results.append(
                RunResult(
                    seed=h.seed,
                    status="failed",
                    history_path=h.path,
                    error=h.final.get("error"),
                )
            )

    ok_histories = [h for h in histories if h.final.get("status") == "ok"]
    iteration_stats = []
    if ok_histories:
        t_max = first.experiment["t_max"]
        for index in range(t_max):
            values = [_raw(float(h.iterations[index]["gbest"]), sense) for h in ok_histories]
            iteration_stats.append(
                (index + 1, statistics.median(values), min(values), max(values))
            )

    finals = [r.final_best_raw for r in results if r.status == "ok"]
    return RunSummary(
        objective=first.experiment["objective"],
        dimension=first.experiment["dimension"],
        algorithm=first.experiment["algorithm"],
        sense=sense,
        population_size=first.experiment["population_size"],
        t_max=first.experiment["t_max"],
        config_digest=first.header.get("config_digest", ""),
        runs=tuple(results),
        median_final=statistics.median(finals) if finals else None,
        min_final=min(finals) if finals else None,
        max_final=max(finals) if finals else None,
        wall_clock_seconds=None,
        iteration_stats=tuple(iteration_stats),
    )


def emit_plot_data(history_paths: list, out_path: str | Path) -> Path:
    """Write a convergence CSV: one best-so-far column per run.

    Columns: ``iteration``, then ``best_<algorithm>_seed<seed>`` per run,
    then ``sbest_<algorithm>_seed<seed>_w<k>`` for each multi-swarm run with
    k up to the run's first-stage swarm count.  Swarm cells are blank once a
    collapse has retired that swarm.  Values are raw-sense.
    """
    if not history_paths:
        raise ConfigurationError("no history files given")
    histories = [read_history(p) for p in history_paths]
    _check_histories_match(histories)
    for h in histories:
        if h.final.get("status") != "ok":
            raise ConfigurationError(f"{h.path}: cannot plot a failed run")

    labels = []
    seen: dict[str, int] = {}
    for h in histories:
        base = f"{h.experiment['algorithm']}_seed{h.seed}"
        seen[base] = seen.get(base, 0) + 1
        labels.append(base if seen[base] == 1 else f"{base}_{seen[base]}")

    swarm_widths = [h.experiment["stage_plan"][0][0] for h in histories]
    columns = ["iteration"]
    columns += [f"best_{label}" for label in labels]
    for label, width in zip(labels, swarm_widths):
        if width > 1:
            columns += [f"sbest_{label}_w{k}" for k in range(width)]

    t_max = histories[0].experiment["t_max"]
    lines = [",".join(columns)]
    for index in range(t_max):
        cells = [str(index + 1)]
        for h in histories:
            cells.append(repr(_raw(float(h.iterations[index]["gbest"]), h.sense)))
        for h, width in zip(histories, swarm_widths):
            if width <= 1:
                continue
            sbest = h.iterations[index]["sbest"]
            for k in range(width):
                cells.append(repr(_raw(float(sbest[k]), h.sense)) if k < len(sbest) else "")
        lines.append(",".join(cells))

    target = Path(out_path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write plot data to {target}: {exc}") from exc
    return target
