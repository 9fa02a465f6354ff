#!/usr/bin/env python3
"""Compare the compiled and pure-numpy step kernels.

Times the velocity and advance kernels at benchmark-realistic shapes and
checks that both implementations produce bit-identical output.  Run with the
default backend so the compiled variant is available:

    python3 benchmarks/bench_backends.py
"""

from __future__ import annotations

from time import perf_counter

import numpy as np

from swarmstage._backend import BACKEND
from swarmstage.core import SearchSpace, init_population
from swarmstage.kernels import backend_implementations

SHAPES = ((40, 10), (40, 30), (40, 90), (200, 90))
REPEATS = 300


def bench_case(count: int, dim: int, impls) -> None:
    space = SearchSpace.box(dim, -5.12, 5.12)
    particles = init_population(space, count, seed=9)
    pos = np.stack([p.position for p in particles])
    vel = np.random.default_rng(1).normal(0.0, 0.5, size=pos.shape)
    pbest = pos + np.random.default_rng(2).normal(0.0, 0.1, size=pos.shape)
    attractor = pbest[0]  # kernels take the shared swarm-best row, not a matrix
    vmax = space.velocity_max

    outputs = {}
    timings = {}
    for name, (velocity, advance) in impls.items():
        velocity(pos, vel, pbest, attractor, 0.729, 1.49445, 1.49445, vmax, 3, 0, 0)  # warmup
        start = perf_counter()
        for t in range(REPEATS):
            new_vel = velocity(pos, vel, pbest, attractor, 0.729, 1.49445, 1.49445, vmax, 3, t, 0)
            moved = pos.copy()
            advance(moved, new_vel, space.lower, space.upper)
        timings[name] = (perf_counter() - start) / REPEATS
        outputs[name] = (new_vel, moved)

    line = f"pop {count:4d} x dim {dim:3d}:"
    for name in sorted(timings):
        line += f"  {name} {timings[name] * 1e6:8.1f} us"
    if len(timings) == 2:
        line += f"  speedup {timings['numpy'] / timings['numba']:.2f}x"
        vel_match = np.array_equal(outputs["numpy"][0], outputs["numba"][0])
        pos_match = np.array_equal(outputs["numpy"][1], outputs["numba"][1])
        line += f"  bit-identical {'yes' if vel_match and pos_match else 'NO'}"
    print(line)


def main() -> int:
    impls = backend_implementations()
    print(f"active backend: {BACKEND}; implementations: {', '.join(sorted(impls))}")
    if "numba" not in impls:
        print("compiled backend unavailable; timing the numpy path only")
    for count, dim in SHAPES:
        bench_case(count, dim, impls)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
