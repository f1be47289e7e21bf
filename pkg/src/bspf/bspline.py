"""Clamped B-spline bases: knots, Cox-de Boor evaluation, design matrices."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from ._colwise import matmul
from .errors import InsufficientBasisError, OutOfDomainError
from .grid import Grid
from .kernels import basis_local_derivatives, spline_sum


@dataclass(frozen=True)
class KnotVector:
    degree: int
    n_basis: int
    knots: np.ndarray
    clustering_beta: Optional[float] = None

    def __post_init__(self):
        k = np.array(self.knots, dtype=float)
        if k.size != self.n_basis + self.degree + 1:
            raise ValueError(f"knot vector length {k.size} != n + p + 1 = {self.n_basis + self.degree + 1}")
        if np.any(np.diff(k) < 0):
            raise ValueError("knots must be non-decreasing")
        k.setflags(write=False)
        object.__setattr__(self, "knots", k)

    @property
    def a(self) -> float:
        return float(self.knots[0])

    @property
    def b(self) -> float:
        return float(self.knots[-1])

    @property
    def interior(self) -> np.ndarray:
        p = self.degree
        return self.knots[p + 1 : self.n_basis]

    def elevated(self) -> "KnotVector":
        """Degree ``p+1`` clamped knots (one extra copy of each end knot)."""
        k = np.concatenate([[self.knots[0]], self.knots, [self.knots[-1]]])
        return KnotVector(self.degree + 1, self.n_basis + 1, k, self.clustering_beta)


def build_knots(grid: Grid, degree: int, n_basis: int, beta: Optional[float] = None) -> KnotVector:
    """Clamped knots on ``[a, b]``; interior knots uniform or tanh edge-clustered.

    With ``beta`` the unit-interval interior knots ``t`` are mapped through
    ``(1 + tanh(beta s) / tanh(beta)) / 2`` with ``s = 2t - 1``, which clusters
    them symmetrically toward both ends.
    """
    p, n = int(degree), int(n_basis)
    if p < 1:
        raise ValueError(f"degree must be >= 1, got {p}")
    if n < 2 * p:
        raise InsufficientBasisError(f"n_basis={n} < 2*degree={2 * p}: boundary system unsolvable")
    t = np.arange(1, n - p) / (n - p)
    if beta:
        s = 2.0 * t - 1.0
        t = 0.5 * (1.0 + np.tanh(beta * s) / np.tanh(beta))
    unit = np.concatenate([np.zeros(p + 1), t, np.ones(p + 1)])
    knots = grid.a + (grid.b - grid.a) * unit
    knots[: p + 1] = grid.a
    knots[n:] = grid.b
    return KnotVector(p, n, knots, float(beta) if beta else None)


def _check_domain(kv: KnotVector, x):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < kv.a) or np.any(x > kv.b) or not np.all(np.isfinite(x)):
        raise OutOfDomainError(f"evaluation point outside [{kv.a}, {kv.b}]")
    return x


def eval_basis_many(kv: KnotVector, x, max_deriv: int = 0) -> np.ndarray:
    """Dense values ``out[i, k, j] = B^{(k)}_{i,p}(x_j)``, shape ``(n, max_deriv+1, len(x))``."""
    p, n = kv.degree, kv.n_basis
    if not 0 <= max_deriv <= p:
        raise ValueError(f"max_deriv must lie in [0, {p}]")
    x = _check_domain(kv, x)
    spans, local = basis_local_derivatives(kv.knots, p, n, x, max_deriv)
    out = np.zeros((n, max_deriv + 1, x.size))
    cols = np.arange(x.size)
    for j in range(p + 1):
        out[spans - p + j, :, cols] = local[:, :, j]
    return out


def eval_basis(kv: KnotVector, x: float, max_deriv: int = 0) -> np.ndarray:
    """All ``n`` basis functions and derivatives at one point, shape ``(n, max_deriv+1)``."""
    return eval_basis_many(kv, [x], max_deriv)[:, :, 0]


def basis_antiderivative_many(kv: KnotVector, x) -> np.ndarray:
    """``out[i, j] = integral_a^{x_j} B_{i,p}``, shape ``(n, len(x))``.

    Uses ``int_a^x B_{i,p} = (z_{i+p+1} - z_i)/(p+1) * sum_{l > i} B_{l,p+1}(x)``
    on the degree-elevated clamped knots.
    """
    x = _check_domain(kv, x)
    p, n, z = kv.degree, kv.n_basis, kv.knots
    up = kv.elevated()
    vals = eval_basis_many(up, x, 0)[:, 0, :]
    tail = np.cumsum(vals[::-1], axis=0)[::-1]
    widths = (z[p + 1 : p + 1 + n] - z[:n]) / (p + 1)
    return widths[:, None] * tail[1:]


def basis_antiderivative(kv: KnotVector, x: float) -> np.ndarray:
    return basis_antiderivative_many(kv, [x])[:, 0]


@dataclass(frozen=True)
class BsplineBasis:
    """A knot vector sampled on a grid.

    Evaluation uses the compact per-point form (``spans``, ``local``) at
    O(pN) cost; the dense ``n x N`` design matrices are built on first access.
    """

    knots: KnotVector
    grid: Grid
    spans: np.ndarray = field(repr=False)
    local: np.ndarray = field(repr=False)
    local_int: np.ndarray = field(repr=False)

    @property
    def degree(self) -> int:
        return self.knots.degree

    @property
    def n_basis(self) -> int:
        return self.knots.n_basis

    @cached_property
    def antiderivative_knots(self) -> KnotVector:
        return self.knots.elevated()

    @cached_property
    def index(self) -> np.ndarray:
        p = self.degree
        return self.spans[:, None] - p + np.arange(p + 1)

    def _dense(self, local):
        n, N = self.n_basis, self.grid.n_points
        out = np.zeros((n, N))
        cols = np.arange(N)
        for j in range(local.shape[1]):
            out[self.index[:, j], cols] += local[:, j]
        out.setflags(write=False)
        return out

    @cached_property
    def index_t(self) -> np.ndarray:
        return np.ascontiguousarray(self.index.T)

    @cached_property
    def local_t(self) -> np.ndarray:
        # (derivative, local j, point) so the per-j rows are contiguous.
        return np.ascontiguousarray(np.moveaxis(self.local, 0, 2))

    @cached_property
    def design(self) -> np.ndarray:
        return self._dense(self.local[:, 0, :])

    @cached_property
    def design_d1(self) -> np.ndarray:
        return self._dense(self.local[:, 1, :])

    @cached_property
    def design_int(self) -> np.ndarray:
        return self.local_int

    def evaluate(self, coeffs: np.ndarray, deriv_order: int = 0) -> np.ndarray:
        """``sum_i P_i B^{(k)}_{i,p}(x_j)``; ``coeffs`` may be ``(n,)`` or ``(n, K)``."""
        coeffs = np.asarray(coeffs, dtype=float)
        c2 = np.ascontiguousarray(coeffs.reshape(coeffs.shape[0], -1))
        out = spline_sum(self.index_t, self.local_t[deriv_order], c2)
        return out.reshape((-1,) + coeffs.shape[1:])

    def integrate(self, coeffs: np.ndarray) -> np.ndarray:
        """``sum_i P_i int_a^{x_j} B_{i,p}`` on the grid."""
        return matmul(self.local_int.T, coeffs)


def build_design_matrices(kv: KnotVector, grid: Grid) -> BsplineBasis:
    if not (np.isclose(kv.a, grid.a) and np.isclose(kv.b, grid.b)):
        raise ValueError("knot span does not match grid domain")
    spans, local = basis_local_derivatives(kv.knots, kv.degree, kv.n_basis, grid.points, 1)
    local = np.ascontiguousarray(local)
    local_int = basis_antiderivative_many(kv, grid.points)
    for arr in (spans, local, local_int):
        arr.setflags(write=False)
    return BsplineBasis(kv, grid, spans, local, local_int)
