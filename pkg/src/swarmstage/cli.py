"""Command-line interface for running and inspecting experiments.

Exit codes: 0 when everything succeeded, 1 when any run failed or an output
could not be written, 2 when configuration or arguments are invalid.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, replace

from .errors import ConfigurationError, EvaluationError
from .harness import emit_plot_data, load_config, run_experiment, summarize
from .presets import ALGORITHM_NAMES, DEFAULT_T_MAX, preset

EXIT_OK = 0
EXIT_RUN_FAILED = 1
EXIT_BAD_CONFIG = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmstage",
        description="Staged multi-swarm particle swarm optimization experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run every seed of an experiment config")
    run_p.add_argument("config", help="path to a JSON experiment config")
    run_p.add_argument("--force", action="store_true", help="overwrite existing output files")
    run_p.add_argument(
        "--parallelism",
        metavar="N",
        help="override evaluation parallelism (positive integer or 'auto')",
    )
    run_p.add_argument("--output", metavar="DIR", help="override the config's output directory")

    sum_p = sub.add_parser("summarize", help="recompute statistics from history files")
    sum_p.add_argument("histories", nargs="+", help="history JSONL files from one experiment")

    plot_p = sub.add_parser("plot-data", help="write a convergence CSV from history files")
    plot_p.add_argument("histories", nargs="+", help="history JSONL files sharing an objective")
    plot_p.add_argument("-o", "--output", required=True, metavar="FILE", help="CSV path to write")

    sub.add_parser("presets", help="list the named algorithm presets")
    return parser


def _cmd_run(args) -> int:
    config = load_config(args.config)
    if args.output is not None:
        config = replace(config, output_dir=args.output)
    if args.parallelism is not None:
        setting = args.parallelism if args.parallelism == "auto" else None
        if setting is None:
            try:
                setting = int(args.parallelism)
            except ValueError:
                raise ConfigurationError(
                    f"--parallelism: expected a positive integer or 'auto', got {args.parallelism!r}"
                ) from None
        config = replace(config, parallelism=setting)
    summary = run_experiment(config, force=args.force, log=print)
    if summary.median_final is not None:
        print(
            f"{config.algorithm} on {config.objective}-{config.dimension}: "
            f"median final {summary.median_final:.6g} "
            f"(min {summary.min_final:.6g}, max {summary.max_final:.6g})"
        )
    print(f"outputs in {config.output_dir}")
    if summary.failed:
        failed = [str(r.seed) for r in summary.runs if r.status != "ok"]
        print(f"failed seeds: {', '.join(failed)}", file=sys.stderr)
        return EXIT_RUN_FAILED
    return EXIT_OK


def _cmd_summarize(args) -> int:
    summary = summarize(args.histories)
    print(f"objective: {summary.objective}-{summary.dimension} ({summary.sense})")
    print(f"algorithm: {summary.algorithm}, t_max {summary.t_max}, pop {summary.population_size}")
    for result in summary.runs:
        if result.status == "ok":
            print(
                f"  seed {result.seed}: final best {result.final_best_raw:.6g} "
                f"({result.eval_count} evaluations)"
            )
        else:
            print(f"  seed {result.seed}: FAILED ({result.error})")
    if summary.median_final is not None:
        print(
            f"final best: median {summary.median_final:.6g}, "
            f"min {summary.min_final:.6g}, max {summary.max_final:.6g}"
        )
    else:
        print("final best: no successful runs")
    return EXIT_RUN_FAILED if summary.failed else EXIT_OK


def _cmd_plot_data(args) -> int:
    target = emit_plot_data(args.histories, args.output)
    print(f"wrote {target}")
    return EXIT_OK


def _cmd_presets(args) -> int:
    for name in ALGORITHM_NAMES:
        schedule, plan = preset(name, DEFAULT_T_MAX)
        stages = ", ".join(f"{count}x{iters}" for count, iters in plan.stages)
        print(f"{name}:")
        print(f"  stages: {stages}")
        print(f"  schedule: {json.dumps(asdict(schedule), sort_keys=True)}")
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "summarize": _cmd_summarize,
    "plot-data": _cmd_plot_data,
    "presets": _cmd_presets,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigurationError as exc:
        for message in exc.messages:
            print(f"error: {message}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except EvaluationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUN_FAILED
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUN_FAILED


if __name__ == "__main__":
    sys.exit(main())
