"""Counter-based random draws keyed by (seed, iteration, particle, dimension, slot).

Unlike a sequential generator, every draw is a pure hash of its key, so the
stream a particle sees does not depend on call order, thread scheduling, or
how many other particles exist. That is what makes runs replayable
bit-for-bit under any degree of evaluation parallelism.

The hash is two rounds short of nothing fancy: a splitmix64-style finalizer
applied to each key field in turn. Output floats lie in [0, 1) with 53 bits
of precision. Three implementations exist and are tested bit-identical:

* :func:`draw_uniform`: scalar, pure Python integers.
* :func:`uniform_block`: vectorized numpy over a (particles x dimensions) block.
* the numba loop inside :mod:`swarmstage.kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_M64 = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15
_MULT1 = 0xBF58476D1CE4E5B9
_MULT2 = 0x94D049BB133111EB
_INV53 = 1.0 / 9007199254740992.0  # 2**-53

SLOT_COGNITIVE = 0
SLOT_SOCIAL = 1


@dataclass(frozen=True)
class RngStreamKey:
    """Key identifying one uniform draw.

    ``iteration`` is -1 for the initialization pass, then the iteration
    clock value. ``draw_slot`` is 0 for the cognitive draw (r1) and 1 for
    the social draw (r2).
    """

    seed: int
    iteration: int
    particle_global_index: int
    dimension: int
    draw_slot: int


def mix64(z: int) -> int:
    """One splitmix64 finalizer round on a 64-bit value (python ints)."""
    z &= _M64
    z = ((z ^ (z >> 30)) * _MULT1) & _M64
    z = ((z ^ (z >> 27)) * _MULT2) & _M64
    return z ^ (z >> 31)


def seed_iter_state(seed: int, iteration: int) -> int:
    """Premixed 64-bit state shared by all draws of one (seed, iteration)."""
    return mix64(mix64((seed & _M64) ^ _GAMMA) ^ (iteration & _M64))


def _to_unit(h: int) -> float:
    return (h >> 11) * _INV53


def draw_uniform(key: RngStreamKey) -> float:
    """Uniform draw in [0, 1), a pure function of the key."""
    h = seed_iter_state(key.seed, key.iteration)
    h = mix64(h ^ (key.particle_global_index & _M64))
    h = mix64(h ^ (key.dimension & _M64))
    h = mix64(h ^ (key.draw_slot & _M64))
    return _to_unit(h)


def _mix64_arr(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MULT1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MULT2)
    return z ^ (z >> np.uint64(31))


def particle_dim_state(seed: int, iteration: int, row0: int, count: int, dim: int) -> np.ndarray:
    """(count, dim) uint64 states, mixed through particle then dimension.

    ``row0`` is the global index of the first particle in the block; rows
    keep their global identity so a particle's stream is unchanged when
    other swarms are added or removed.
    """
    h2 = np.uint64(seed_iter_state(seed, iteration))
    rows = (np.uint64(row0) + np.arange(count, dtype=np.uint64))[:, None]
    cols = np.arange(dim, dtype=np.uint64)[None, :]
    return _mix64_arr(_mix64_arr(h2 ^ rows) ^ cols)


def uniform_block(
    seed: int, iteration: int, row0: int, count: int, dim: int, slot: int
) -> np.ndarray:
    """(count, dim) uniform draws, one per (particle, dimension) pair.

    Bit-identical to calling :func:`draw_uniform` elementwise.
    """
    hs = _mix64_arr(particle_dim_state(seed, iteration, row0, count, dim) ^ np.uint64(slot))
    return (hs >> np.uint64(11)).astype(np.float64) * _INV53
