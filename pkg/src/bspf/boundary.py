"""One-sided Taylor stencils for endpoint derivatives and the boundary constraint system."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable

import numpy as np

from ._colwise import matmul
from .bspline import KnotVector, eval_basis
from .errors import IllConditionedWarning, IndexOutOfRangeError, NonFiniteSampleError
from .grid import Field, Grid

MAX_STENCIL = 20
WARN_STENCIL = 16


def _exact_inverse(a: list) -> np.ndarray:
    """Gauss-Jordan inverse of a square matrix of Fractions, rounded once to float."""
    m = len(a)
    rows = [list(r) + [Fraction(int(i == j)) for i in range(m)] for j, r in enumerate(a)]
    for col in range(m):
        piv = next(r for r in range(col, m) if rows[r][col] != 0)
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = 1 / rows[col][col]
        rows[col] = [v * inv for v in rows[col]]
        for r in range(m):
            if r != col and rows[r][col] != 0:
                fac = rows[r][col]
                rows[r] = [v - fac * w for v, w in zip(rows[r], rows[col])]
    out = np.array([[float(v) for v in row[m:]] for row in rows])
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def unit_taylor_inverse(m: int) -> np.ndarray:
    """Inverse of ``V[j, k] = j**k / k!`` (j, k < m), computed exactly in rationals."""
    return _exact_inverse([[Fraction(j**k, factorial(k)) for k in range(m)] for j in range(m)])


@lru_cache(maxsize=None)
def mirror_taylor_inverse(p: int, parity: str) -> tuple[np.ndarray, np.ndarray]:
    """Taylor fit on a mirror-extended grid for a function even or odd about the endpoint.

    Only the orders ``k < p`` of matching parity are unknowns; the others vanish.
    Returns the orders and the exact inverse acting on ``f[0], f[1], ...``
    (even) or ``f[1], f[2], ...`` (odd) in unit spacing.
    """
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    first = 0 if parity == "even" else 1
    orders = np.arange(first, p, 2)
    pts = range(first, first + orders.size)
    inv = _exact_inverse([[Fraction(j ** int(k), factorial(int(k))) for k in orders] for j in pts])
    orders.setflags(write=False)
    return orders, inv


def mirror_boundary_derivatives(grid: Grid, values: np.ndarray, p: int, side: str, parity: str) -> np.ndarray:
    """Endpoint derivatives ``f^{(k)}, k < p`` of a field with known parity about the wall at ``side``."""
    orders, inv = mirror_taylor_inverse(p, parity)
    first = 0 if parity == "even" else 1
    q = orders.size
    if first + q > values.shape[0]:
        raise ValueError(f"mirror stencil needs {first + q} points, grid has {values.shape[0]}")
    h = grid.spacing if side == "a" else -grid.spacing
    line = values if side == "a" else values[::-1]
    d = np.zeros((p,) + values.shape[1:])
    d[orders] = matmul(inv / h ** orders[:, None].astype(float), line[first : first + q])
    return d


@dataclass(frozen=True)
class BoundaryStencil:
    """Inverted Taylor/Vandermonde systems on the first and last ``m`` grid points.

    ``vandermonde_left_inv @ f[:m]`` gives ``f^{(k)}(a)`` for ``k < m``; the right
    matrix acts on ``f[N-1], f[N-2], ...``.
    """

    m: int
    vandermonde_left_inv: np.ndarray
    vandermonde_right_inv: np.ndarray
    grid: Grid

    def vandermonde_left(self) -> np.ndarray:
        k = np.arange(self.m)[None, :]
        x = self.grid.points[: self.m, None] - self.grid.a
        return x**k / np.array([factorial(int(v)) for v in range(self.m)])[None, :]

    def vandermonde_right(self) -> np.ndarray:
        k = np.arange(self.m)[None, :]
        x = self.grid.points[::-1][: self.m, None] - self.grid.b
        return x**k / np.array([factorial(int(v)) for v in range(self.m)])[None, :]


def build_stencil(grid: Grid, m: int) -> BoundaryStencil:
    m = int(m)
    if m < 2 or m > grid.n_points:
        raise ValueError(f"stencil width m={m} must satisfy 2 <= m <= N={grid.n_points}")
    if m > MAX_STENCIL:
        raise ValueError(f"stencil width m={m} exceeds the supported maximum {MAX_STENCIL}")
    vinv = unit_taylor_inverse(m)
    if m > WARN_STENCIL:
        j = np.arange(m)[:, None]
        k = np.arange(m)[None, :]
        cond = np.linalg.cond(j**k / np.array([float(factorial(v)) for v in range(m)]))
        warnings.warn(
            f"boundary stencil m={m}: Taylor system condition number ~{cond:.1e}; expect a raised error floor",
            IllConditionedWarning,
            stacklevel=2,
        )
    h = grid.spacing
    k = np.arange(m)
    left = vinv / h ** k[:, None]
    right = vinv / (-h) ** k[:, None]
    left.setflags(write=False)
    right.setflags(write=False)
    return BoundaryStencil(m, left, right, grid)


@dataclass(frozen=True)
class BoundaryData:
    """Endpoint derivatives ``[f(a), ..., f^{(p-1)}(a), f(b), ..., f^{(p-1)}(b)]``.

    ``d`` may carry a trailing batch axis, one column per line of a 2D field.
    """

    d: np.ndarray
    overrides: tuple = ()

    @property
    def degree(self) -> int:
        return self.d.shape[0] // 2

    @property
    def left(self) -> np.ndarray:
        return self.d[: self.degree]

    @property
    def right(self) -> np.ndarray:
        return self.d[self.degree :]


def _values(f):
    return f.values if isinstance(f, Field) else np.asarray(f, dtype=float)


def boundary_derivatives(stencil: BoundaryStencil, values: np.ndarray, p: int) -> np.ndarray:
    """Raw array form of :func:`estimate_boundary_derivatives`; ``values`` is ``(N,)`` or ``(N, K)``."""
    m = stencil.m
    left = matmul(stencil.vandermonde_left_inv[:p], values[:m])
    right = matmul(stencil.vandermonde_right_inv[:p], values[::-1][:m])
    return np.concatenate([left, right], axis=0)


def estimate_boundary_derivatives(stencil: BoundaryStencil, f, p: int) -> BoundaryData:
    if p > stencil.m:
        raise ValueError(f"cannot estimate {p} derivatives from an m={stencil.m} stencil")
    values = _values(f)
    if values.shape[0] != stencil.grid.n_points:
        raise ValueError("field does not live on the stencil grid")
    if not np.all(np.isfinite(values)):
        raise NonFiniteSampleError("boundary stencil received non-finite samples")
    return BoundaryData(boundary_derivatives(stencil, values, p))


def apply_bc_overrides(data: BoundaryData, overrides: Iterable[tuple[int, float]]) -> BoundaryData:
    """Replace selected entries of ``d``: ``(0, u_a)``/``(p, u_b)`` Dirichlet, ``(1, .)``/``(p+1, .)`` Neumann."""
    overrides = tuple((int(k), v) for k, v in overrides)
    if not overrides:
        return data
    d = np.array(data.d, dtype=float)
    for k, v in overrides:
        if not 0 <= k < d.shape[0]:
            raise IndexOutOfRangeError(f"override index {k} outside [0, {d.shape[0]})")
        d[k] = v
    return BoundaryData(d, data.overrides + overrides)


@dataclass(frozen=True)
class ConstraintMatrix:
    """``c[k] = B^{(k)}_{.,p}(a)`` for ``k < p`` and ``c[p+k] = B^{(k)}_{.,p}(b)``."""

    c: np.ndarray

    @property
    def degree(self) -> int:
        return self.c.shape[0] // 2


def build_constraint_matrix(kv: KnotVector) -> ConstraintMatrix:
    p = kv.degree
    left = eval_basis(kv, kv.a, p - 1).T
    right = eval_basis(kv, kv.b, p - 1).T
    c = np.vstack([left, right])
    c.setflags(write=False)
    return ConstraintMatrix(c)


def dirichlet(p: int, left=None, right=None) -> list[tuple[int, float]]:
    """Override list for Dirichlet data at either end (``None`` leaves it estimated)."""
    out = []
    if left is not None:
        out.append((0, left))
    if right is not None:
        out.append((p, right))
    return out


def neumann(p: int, left=None, right=None) -> list[tuple[int, float]]:
    out = []
    if left is not None:
        out.append((1, left))
    if right is not None:
        out.append((p + 1, right))
    return out
