"""Kernel backend selection.

Hot numeric kernels (see ``seecr._kernels``) are written as plain numpy code
and compiled with numba by default. Set the environment variable

    SEECR_BACKEND=numpy

before import to run the same code un-jitted (pure numpy / Python). The
numpy path is slow but has no compiled dependency in the loop, which is
handy for debugging and for machines where numba is unavailable; in that
case the fallback is selected automatically.
"""

import os
import warnings

ENV_VAR = "SEECR_BACKEND"

_requested = os.environ.get(ENV_VAR, "numba").strip().lower()
if _requested in ("", "numba", "jit"):
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - depends on environment
        _njit = None
        NUMBA_ENABLED = False
        warnings.warn("numba is not importable; using the pure numpy backend")
elif _requested in ("numpy", "python", "none"):
    _njit = None
    NUMBA_ENABLED = False
else:  # pragma: no cover - defensive
    raise ValueError(
        f"{ENV_VAR}={_requested!r} not understood (use 'numba' or 'numpy')"
    )

BACKEND = "numba" if NUMBA_ENABLED else "numpy"


def maybe_njit(func=None, **options):
    """Apply ``numba.njit`` when the numba backend is active, else no-op.

    Usable bare (``@maybe_njit``) or with options
    (``@maybe_njit(cache=True)``).
    """

    def wrap(f):
        if not NUMBA_ENABLED:
            return f
        options.setdefault("cache", True)
        return _njit(**options)(f)

    if func is None:
        return wrap
    return wrap(func)
