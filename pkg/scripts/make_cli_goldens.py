#!/usr/bin/env python3
"""Regenerate the command-line golden files.

Runs the pinned tiny experiment from tests/test_acceptance.py into a
temporary directory and copies the seed-1 history and the convergence CSV
into tests/data/.  Output bytes are deterministic (seeded runs, no wall
clock in either file), so these goldens are stable across machines and
across the numba/numpy backends.

Run from the repository root:

    python3 scripts/make_cli_goldens.py
"""

from __future__ import annotations

import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))
sys.path.insert(0, str(REPO / "tests"))

from swarmstage import ExperimentConfig, run_experiment  # noqa: E402
from swarmstage.harness import history_path_for  # noqa: E402

from test_acceptance import GOLDEN_PAYLOAD  # noqa: E402

DATA_DIR = REPO / "tests" / "data"


def main() -> int:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as scratch:
        config = ExperimentConfig(
            **{**GOLDEN_PAYLOAD, "seeds": tuple(GOLDEN_PAYLOAD["seeds"])},
            output_dir=scratch,
        )
        run_experiment(config)
        history = history_path_for(config, 1).read_bytes()
        plot = (Path(scratch) / "convergence.csv").read_bytes()
    (DATA_DIR / "golden_history_seed1.jsonl").write_bytes(history)
    (DATA_DIR / "golden_convergence.csv").write_bytes(plot)
    print(f"wrote {DATA_DIR / 'golden_history_seed1.jsonl'} ({len(history)} bytes)")
    print(f"wrote {DATA_DIR / 'golden_convergence.csv'} ({len(plot)} bytes)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
