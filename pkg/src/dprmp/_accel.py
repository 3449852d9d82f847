"""Numba availability switch.

Set ``DPRMP_DISABLE_NUMBA=1`` to force the pure-numpy kernels even when
numba is importable. ``NUMBA_IMPORTABLE`` ignores the flag so benchmarks
can still time both paths.
"""
import os

DISABLED = os.environ.get("DPRMP_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    from numba import njit

    NUMBA_IMPORTABLE = True
except ImportError:  # pragma: no cover - depends on environment
    NUMBA_IMPORTABLE = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


HAVE_NUMBA = NUMBA_IMPORTABLE and not DISABLED


def backend_name():
    return "numba" if HAVE_NUMBA else "numpy"
