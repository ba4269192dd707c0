"""Optional numba acceleration.

Kernels are written once in plain numpy-compatible Python. They are compiled
with ``numba.njit`` unless ``COLLCOH_DISABLE_NUMBA`` is set to a truthy value
or numba is not importable, in which case the interpreted source runs as is.
"""

import os

_FLAG = os.environ.get("COLLCOH_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and not _DISABLED


def njit(fn):
    """Compile ``fn`` in nopython mode, or return it untouched."""
    if numba is None:
        return fn
    return numba.njit(cache=True)(fn)


def maybe_njit(fn):
    """Like :func:`njit` but honours the env flag."""
    return njit(fn) if USE_NUMBA else fn
