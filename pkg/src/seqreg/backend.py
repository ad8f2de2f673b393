"""Kernel backend selection.

Hot inner loops (interpolation, Gram assembly) exist twice: a numba
``@njit`` version and a vectorized pure-numpy fallback.  The numba path is
the default whenever numba imports; setting the environment variable
``SEQREG_NO_NUMBA=1`` before import forces the numpy path.  Both paths
compute the same quantities to floating-point rounding.
"""

from __future__ import annotations

import os

_TRUTHY = ("1", "true", "yes", "on")


def _numba_disabled() -> bool:
    return os.environ.get("SEQREG_NO_NUMBA", "").strip().lower() in _TRUTHY


NUMBA_ENABLED = False
if not _numba_disabled():
    try:
        import numba  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"


def set_thread_budget(n: int) -> None:
    """Cap the worker threads used by the numba kernels.

    ``n <= 0`` leaves the current setting untouched.  All kernels write each
    output element from exactly one thread, so results are bit-identical for
    any budget.  The numpy fallback ignores the budget.
    """
    if n <= 0 or not NUMBA_ENABLED:
        return
    import numba

    numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def thread_budget_from_env(default: int = 0) -> int:
    raw = os.environ.get("SEQREG_THREADS", "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        return default
