"""Numba/numpy backend selection for the hot kernels.

Every accelerated function in :mod:`swarmstage.kernels` has two
implementations with bit-identical output: a numba ``@njit`` version and a
pure-numpy version. The active one is chosen once at import time:

* ``SWARMSTAGE_BACKEND=numpy`` forces the pure-numpy path.
* ``SWARMSTAGE_BACKEND=numba`` requires numba and fails loudly if it is
  missing.
* unset: numba when importable, numpy otherwise.

``benchmarks/bench_backends.py`` compares the two paths; the test suite
asserts they agree bit-for-bit.
"""

from __future__ import annotations

import os

_requested = os.environ.get("SWARMSTAGE_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"SWARMSTAGE_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numpy":
    HAVE_NUMBA = False
else:
    try:
        import numba  # noqa: F401

        HAVE_NUMBA = True
    except ImportError:
        if _requested == "numba":
            raise RuntimeError("SWARMSTAGE_BACKEND=numba but numba is not importable")
        HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"

if HAVE_NUMBA:
    from numba import njit
else:

    def njit(*args, **kwargs):
        """Transparent @njit stand-in for the numpy-only path."""

        def wrapper(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrapper
