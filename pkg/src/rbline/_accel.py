"""Numba availability and the env switch for the pure-Python fallback.

Set ``RBLINE_NO_NUMBA=1`` to force the pure-Python engines everywhere the
package would otherwise JIT-compile a kernel.  The flag is read once at
import time.
"""

from __future__ import annotations

import os

try:
    import numba  # noqa: F401
    _NUMBA_IMPORTED = True
except ImportError:
    _NUMBA_IMPORTED = False

NUMBA_DISABLED = os.environ.get("RBLINE_NO_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}
HAVE_NUMBA = _NUMBA_IMPORTED and not NUMBA_DISABLED


def default_backend() -> str:
    return "numba" if HAVE_NUMBA else "python"
