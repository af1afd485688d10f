"""Numba switch.

Hot kernels come in two flavours: a numba ``@njit`` version and a plain numpy
version. ``BPWMC_NO_NUMBA=1`` (or a missing numba install) selects the numpy
path. The flag is read at call time so tests can flip it.
"""

import os

try:
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False
    _njit = None

ENV_FLAG = "BPWMC_NO_NUMBA"


def use_numba() -> bool:
    if not HAVE_NUMBA:
        return False
    return os.environ.get(ENV_FLAG, "").strip().lower() in ("", "0", "false", "no")


def njit(*args, **kwargs):
    """``numba.njit`` with ``cache=True``; identity decorator without numba."""
    if not HAVE_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    return _njit(*args, **kwargs)
