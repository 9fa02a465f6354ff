"""Hot per-iteration kernels: velocity update and position advance.

Each kernel has a numba ``@njit`` implementation and a pure-numpy twin.
They are bit-identical; :mod:`swarmstage._backend` picks which one runs
(``SWARMSTAGE_BACKEND`` env var). All kernels operate on one swarm's
contiguous block of rows; ``row0`` is the global index of the block's
first particle so random streams stay tied to global particle identity.

The velocity rule, per particle i and dimension k::

    v' = omega * v + c1 * r1 * (pbest - x) + c2 * r2 * (attractor - x)

with r1, r2 drawn from slots 0 and 1 of the keyed stream, then clamped to
[-vmax, vmax] componentwise. The position advance adds the velocity and
clamps to the box, zeroing the velocity component on any clipped bound.
"""

from __future__ import annotations

import numpy as np

from ._backend import BACKEND, njit
from .rng import _INV53, _MULT1, _MULT2, _mix64_arr, particle_dim_state, seed_iter_state

__all__ = [
    "velocity_block",
    "advance_block",
    "velocity_math",
    "backend_implementations",
]


def velocity_math(pos, vel, pbest, attractor, omega, c1, c2, vmax, r1, r2):
    """Velocity rule with explicit draws; shared by the numpy path and tests."""
    v = omega * vel + c1 * r1 * (pbest - pos) + c2 * r2 * (attractor - pos)
    return np.clip(v, -vmax, vmax)


def _velocity_block_numpy(pos, vel, pbest, attractor, omega, c1, c2, vmax, seed, iteration, row0):
    n, dim = pos.shape
    base = particle_dim_state(seed, iteration, row0, n, dim)
    r1 = (_mix64_arr(base) >> np.uint64(11)).astype(np.float64) * _INV53
    r2 = (_mix64_arr(base ^ np.uint64(1)) >> np.uint64(11)).astype(np.float64) * _INV53
    return velocity_math(pos, vel, pbest, attractor, omega, c1, c2, vmax, r1, r2)


def _advance_block_numpy(pos, vel, lower, upper):
    pos += vel
    below = pos < lower
    above = pos > upper
    if below.any():
        pos[below] = np.broadcast_to(lower, pos.shape)[below]
        vel[below] = 0.0
    if above.any():
        pos[above] = np.broadcast_to(upper, pos.shape)[above]
        vel[above] = 0.0


@njit(cache=True)
def _mix_nb(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MULT1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MULT2)
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def _velocity_block_nb(pos, vel, pbest, attractor, omega, c1, c2, vmax, h2, row0, out):
    n, dim = pos.shape
    for i in range(n):
        hi = _mix_nb(h2 ^ np.uint64(row0 + i))
        for k in range(dim):
            hk = _mix_nb(hi ^ np.uint64(k))
            r1 = np.float64(_mix_nb(hk) >> np.uint64(11)) * _INV53
            r2 = np.float64(_mix_nb(hk ^ np.uint64(1)) >> np.uint64(11)) * _INV53
            v = (
                omega * vel[i, k]
                + c1 * r1 * (pbest[i, k] - pos[i, k])
                + c2 * r2 * (attractor[k] - pos[i, k])
            )
            if v > vmax[k]:
                v = vmax[k]
            elif v < -vmax[k]:
                v = -vmax[k]
            out[i, k] = v


@njit(cache=True)
def _advance_block_nb(pos, vel, lower, upper):
    n, dim = pos.shape
    for i in range(n):
        for k in range(dim):
            x = pos[i, k] + vel[i, k]
            if x < lower[k]:
                x = lower[k]
                vel[i, k] = 0.0
            elif x > upper[k]:
                x = upper[k]
                vel[i, k] = 0.0
            pos[i, k] = x


def _velocity_block_numba(pos, vel, pbest, attractor, omega, c1, c2, vmax, seed, iteration, row0):
    out = np.empty_like(pos)
    h2 = np.uint64(seed_iter_state(seed, iteration))
    _velocity_block_nb(pos, vel, pbest, attractor, omega, c1, c2, vmax, h2, row0, out)
    return out


def _advance_block_numba(pos, vel, lower, upper):
    _advance_block_nb(pos, vel, np.ascontiguousarray(lower), np.ascontiguousarray(upper))


if BACKEND == "numba":
    velocity_block = _velocity_block_numba
    advance_block = _advance_block_numba
else:
    velocity_block = _velocity_block_numpy
    advance_block = _advance_block_numpy


def backend_implementations():
    """Both implementations of each kernel, for benchmarks and equality tests.

    Returns {"numpy": (velocity_block, advance_block), "numba": ... } with
    the numba entry present only when numba is importable.
    """
    impls = {"numpy": (_velocity_block_numpy, _advance_block_numpy)}
    if BACKEND == "numba":
        impls["numba"] = (_velocity_block_numba, _advance_block_numba)
    return impls
