"""Numba switch.

Set ``SLICEBALL_PURE_NUMPY=1`` to bypass numba entirely and run every kernel
through its vectorised numpy twin.  ``SLICEBALL_THREADS`` caps the numba
thread pool.
"""
import os

USE_NUMBA = os.environ.get("SLICEBALL_PURE_NUMPY", "0").lower() not in ("1", "true", "yes")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    USE_NUMBA = False


def njit(func):
    """``numba.njit(cache=True)`` when enabled, identity otherwise."""
    if numba is None:
        return func
    return numba.njit(cache=True)(func)


def thread_cap():
    raw = os.environ.get("SLICEBALL_THREADS")
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        return None
    return max(1, n)


def apply_thread_cap():
    n = thread_cap()
    if numba is not None and n is not None:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
