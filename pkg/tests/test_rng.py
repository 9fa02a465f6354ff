"""Keyed-draw contract: purity, range, uniformity, and path equivalence."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from swarmstage.kernels import _velocity_block_numba, _velocity_block_numpy
from swarmstage.rng import (
    SLOT_COGNITIVE,
    SLOT_SOCIAL,
    RngStreamKey,
    draw_uniform,
    mix64,
    uniform_block,
)

U64 = st.integers(min_value=0, max_value=2**64 - 1)


def test_same_key_same_value():
    key = RngStreamKey(seed=42, iteration=3, particle_global_index=7, dimension=2, draw_slot=0)
    assert draw_uniform(key) == draw_uniform(key)


def test_slot_constants():
    assert SLOT_COGNITIVE == 0
    assert SLOT_SOCIAL == 1


def test_slots_differ():
    base = dict(seed=9, iteration=0, particle_global_index=0, dimension=0)
    a = draw_uniform(RngStreamKey(draw_slot=0, **base))
    b = draw_uniform(RngStreamKey(draw_slot=1, **base))
    assert a != b


def test_million_keys_no_slot_collisions():
    # 1000 particles x 1000 dims: the two slots never agree on any key
    b0 = uniform_block(123, 5, 0, 1000, 1000, 0)
    b1 = uniform_block(123, 5, 0, 1000, 1000, 1)
    assert int((b0 == b1).sum()) == 0


def test_million_draws_mean():
    b = uniform_block(123, 5, 0, 1000, 1000, 0)
    assert 0.499 <= b.mean() <= 0.501


def test_draws_in_unit_interval():
    b = uniform_block(7, 11, 0, 200, 50, 1)
    assert b.min() >= 0.0
    assert b.max() < 1.0


def test_block_matches_scalar_elementwise():
    seed, it, row0, n, dim, slot = 99, 4, 12, 6, 5, 1
    block = uniform_block(seed, it, row0, n, dim, slot)
    for i in range(n):
        for d in range(dim):
            key = RngStreamKey(seed, it, row0 + i, d, slot)
            assert block[i, d] == draw_uniform(key)


def test_row_offset_preserves_particle_identity():
    # splitting one block in two must not change anyone's draws
    whole = uniform_block(5, 2, 0, 8, 3, 0)
    head = uniform_block(5, 2, 0, 4, 3, 0)
    tail = uniform_block(5, 2, 4, 4, 3, 0)
    np.testing.assert_array_equal(whole[:4], head)
    np.testing.assert_array_equal(whole[4:], tail)


def test_iteration_minus_one_is_distinct_stream():
    init = uniform_block(3, -1, 0, 4, 4, 0)
    first = uniform_block(3, 0, 0, 4, 4, 0)
    assert not np.array_equal(init, first)


def test_mix64_stays_in_64_bits():
    assert 0 <= mix64(2**64 - 1) < 2**64
    assert 0 <= mix64(0) < 2**64


def test_numba_kernel_matches_numpy_bitwise():
    rng = np.random.default_rng(0)
    n, dim = 16, 6
    pos = rng.uniform(-4.0, 4.0, (n, dim))
    vel = rng.uniform(-1.0, 1.0, (n, dim))
    pbest = rng.uniform(-4.0, 4.0, (n, dim))
    attractor = pbest[0].copy()
    vmax = np.full(dim, 2.5)
    args = (pos, vel, pbest, attractor, 0.7, 1.5, 1.5, vmax, 77, 3, 5)
    np.testing.assert_array_equal(_velocity_block_numba(*args), _velocity_block_numpy(*args))


@settings(max_examples=200)
@given(seed=U64, iteration=st.integers(-1, 10**6), particle=st.integers(0, 10**6),
       dim=st.integers(0, 10**4), slot=st.integers(0, 1))
def test_draw_pure_and_in_range(seed, iteration, particle, dim, slot):
    key = RngStreamKey(seed, iteration, particle, dim, slot)
    v = draw_uniform(key)
    assert 0.0 <= v < 1.0
    assert v == draw_uniform(key)
