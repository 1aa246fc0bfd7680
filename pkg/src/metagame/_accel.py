"""Backend selection for the numeric kernels.

Set ``METAGAME_DISABLE_NUMBA=1`` to force the pure-numpy path. The numba path
is used whenever numba imports cleanly and the flag is unset.
"""

import os

_FLAG = "METAGAME_DISABLE_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def numba_requested() -> bool:
    return os.environ.get(_FLAG, "").strip().lower() not in ("1", "true", "yes")


USE_NUMBA = numba is not None and numba_requested()


def njit(fn):
    """Compile ``fn`` with numba when available, otherwise return it untouched."""
    if numba is None:
        return fn
    return numba.njit(cache=True)(fn)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
