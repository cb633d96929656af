"""Switch between numba-compiled kernels and their pure numpy fallbacks.

Set ``UFINSLER_DISABLE_NUMBA=1`` to force the numpy path (useful for debugging
and for the benchmark). If numba is not importable the fallback is used silently.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_FLAG = os.environ.get("UFINSLER_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _FLAG not in ("", "0", "false", "no")
USE_NUMBA = numba is not None and not NUMBA_DISABLED


def njit(fn):
    """Compile ``fn`` with numba when available, otherwise hand it back unchanged."""
    if numba is None:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


def pick(compiled, fallback):
    return compiled if USE_NUMBA else fallback
