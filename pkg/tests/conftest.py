"""Shared fixtures. The warmup run keeps JIT compile time out of timed tests."""

import numpy as np
import pytest

from swarmstage import ScheduleSpec, SearchSpace, StagePlan, run


def _sphere_batch(x: np.ndarray) -> np.ndarray:
    return np.sum(x * x, axis=1)


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    space = SearchSpace.box(2, -1.0, 1.0)
    run(space, _sphere_batch, 4, StagePlan(((2, 1), (1, 1))), ScheduleSpec.constant(), seed=0)
