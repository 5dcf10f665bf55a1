"""Kernel backend selection.

Hot loops ship in two flavours: numba-compiled kernels and a pure numpy /
Python-int fallback.  The choice is made once at import time from the
``GRADED_RAMSEY_BACKEND`` environment variable (``numba`` or ``numpy``).
When unset, numba is used if it imports cleanly.
"""

from __future__ import annotations

import os

ENV_VAR = "GRADED_RAMSEY_BACKEND"


def _resolve() -> str:
    requested = os.environ.get(ENV_VAR, "").strip().lower()
    if requested not in ("", "numba", "numpy"):
        raise ValueError(f"{ENV_VAR} must be 'numba' or 'numpy', got {requested!r}")
    if requested == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if requested == "numba":
            raise
        return "numpy"
    return "numba"


BACKEND = _resolve()
USE_NUMBA = BACKEND == "numba"
