"""Select the compiled kernels when available, else the numpy twin.

Set ``FRACOSC_PURE_PYTHON=1`` to force the fallback. ``FRACOSC_NUM_THREADS``
sets the default thread count of the compiled Monte-Carlo loop.
"""
import os

from . import _kernels_py

if os.environ.get("FRACOSC_PURE_PYTHON", "") not in ("", "0"):
    kernels = _kernels_py
    COMPILED = False
else:
    try:
        from . import _kernels as kernels
        COMPILED = True
    except ImportError:
        kernels = _kernels_py
        COMPILED = False

THREADS_ENV = "FRACOSC_NUM_THREADS"


def num_threads():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1
