"""Backend switch for the hot loops.

``OSCINT_BACKEND=numpy`` (or a missing numba install) selects the
pure-numpy/LAPACK fallbacks; anything else uses the numba kernels.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    numba = None

HAVE_NUMBA = numba is not None
BACKEND = "numba" if HAVE_NUMBA and os.environ.get("OSCINT_BACKEND", "numba").lower() != "numpy" else "numpy"


def jit(func):
    """``njit`` with on-disk caching when numba is importable, else identity."""
    if numba is None:
        return func
    return numba.njit(cache=True, nogil=True)(func)


def dense_threshold() -> int:
    """Largest order for which dense matrices are built (``OSCINT_DENSE_THRESHOLD``)."""
    return int(os.environ.get("OSCINT_DENSE_THRESHOLD", "512"))
