"""Backend selection for the hot numeric kernels.

Kernels are written twice: a numba ``@njit`` loop version and a vectorized
numpy version. ``BSPF_BACKEND=numpy`` (or a missing numba install) selects the
numpy path; anything else uses numba.
"""

import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def _requested_backend():
    value = os.environ.get("BSPF_BACKEND", "numba").strip().lower()
    if value not in ("numba", "numpy"):
        raise ValueError(f"BSPF_BACKEND must be 'numba' or 'numpy', got {value!r}")
    return value


BACKEND = "numba" if (_requested_backend() == "numba" and HAVE_NUMBA) else "numpy"
USE_NUMBA = BACKEND == "numba"


def njit(*args, **kwargs):
    """``numba.njit`` with caching on, or an identity decorator without numba."""
    kwargs.setdefault("cache", True)
    if not HAVE_NUMBA:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn
    return numba.njit(*args, **kwargs)


def select(numba_impl, numpy_impl):
    return numba_impl if USE_NUMBA else numpy_impl
