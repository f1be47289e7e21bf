"""Linear algebra whose per-column result does not depend on the batch width.

BLAS picks kernels by problem shape, so ``(A @ X)[:, :1]`` and ``A @ X[:, :1]``
can differ in the last bit. Batched 2D operators must agree exactly with
per-line 1D calls, so the apply stage accumulates in a fixed order instead.
Every helper takes ``(k,)`` or ``(k, K)`` right-hand sides.
"""

from __future__ import annotations

import numpy as np


def _cols(x):
    x = np.asarray(x, dtype=float)
    return x.reshape(x.shape[0], -1)


def matmul(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``a @ x`` accumulated term by term; meant for short inner dimensions."""
    xc = _cols(x)
    out = np.zeros((a.shape[0], xc.shape[1]))
    for j in range(a.shape[1]):
        out += a[:, j, None] * xc[j]
    return out.reshape((a.shape[0],) + np.shape(x)[1:])


def matmul_long(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``a @ x`` for a long inner dimension, as one contiguous last-axis reduction per entry.

    ``a`` should be C-contiguous.
    """
    xc = _cols(x)
    xt = np.ascontiguousarray(xc.T)
    prod = xt[:, None, :] * a[None, :, :]
    out = np.add.reduce(prod, axis=-1).T
    return out.reshape((a.shape[0],) + np.shape(x)[1:])


def solve_lower(low: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Forward substitution for a lower-triangular ``low``."""
    bc = _cols(b)
    n = low.shape[0]
    out = np.empty_like(bc)
    for i in range(n):
        acc = bc[i].copy()
        for j in range(i):
            acc -= low[i, j] * out[j]
        out[i] = acc / low[i, i]
    return out.reshape(np.shape(b))


def solve_upper(up: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Back substitution for an upper-triangular ``up``."""
    bc = _cols(b)
    n = up.shape[0]
    out = np.empty_like(bc)
    for i in range(n - 1, -1, -1):
        acc = bc[i].copy()
        for j in range(i + 1, n):
            acc -= up[i, j] * out[j]
        out[i] = acc / up[i, i]
    return out.reshape(np.shape(b))
