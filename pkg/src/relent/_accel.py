"""Backend selection for the compiled kernels.

Kernels in :mod:`relent._kernels` come in two flavours: a numba ``@njit``
version and a pure-numpy one. The numba path is used when numba imports
cleanly and ``RELENT_DISABLE_NUMBA`` is unset (or ``0``). The flag is read
once, at import time.
"""

import os

_flag = os.environ.get("RELENT_DISABLE_NUMBA", "").strip().lower()
DISABLED_BY_ENV = _flag not in ("", "0", "false", "no")

try:
    if DISABLED_BY_ENV:
        raise ImportError("numba disabled by RELENT_DISABLE_NUMBA")
    import numba

    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise the identity decorator."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn


def backend():
    return "numba" if HAVE_NUMBA else "numpy"
