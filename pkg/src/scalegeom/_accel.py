"""Backend selection for the compiled kernels.

Set ``SCALEGEOM_JIT=0`` to force the pure-numpy kernels even when numba is
installed.  The flag is read once at import time.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("SCALEGEOM_JIT", "1").strip().lower() not in {
    "0",
    "false",
    "no",
    "off",
}


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, otherwise the identity decorator."""
    if numba is None:
        if args and callable(args[0]):
            return args[0]
        return lambda fn: fn
    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
