"""BSPF operators: periodize with a spline, treat the residual spectrally.

``f' = f_s' + F^-1[i w F(f - f_s)]`` and
``I[f] = I[f_s] + F^-1[F(f - f_s) / (i w)] + S``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatchError
from .grid import Field, Field2D, GridMap, Grid
from .periodizer import PeriodizationPlan, build_plan
from .spectral import (
    SpectralWorkspace,
    make_workspace,
    spectral_antiderivative,
    spectral_derivative,
    spectral_filter,
)


def _raw(f):
    return f.values if isinstance(f, (Field, Field2D)) else np.asarray(f, dtype=float)


@dataclass(frozen=True, eq=False)
class BspfOperator:
    plan: PeriodizationPlan
    workspace: SpectralWorkspace
    map: Optional[GridMap] = None
    bc_overrides: tuple = field(default=())

    def __post_init__(self):
        grid = self.plan.grid
        if not np.isclose(self.workspace.period, grid.length) or self.workspace.n_fft != grid.n_points - 1:
            raise ValueError("workspace does not match the plan grid")
        if self.map is not None:
            if self.map.a != grid.a or self.map.b != grid.b:
                raise ValueError("map domain differs from the grid domain")
            self.map.check_monotone(grid.points)
        object.__setattr__(self, "bc_overrides", tuple(self.bc_overrides))

    @property
    def grid(self) -> Grid:
        return self.plan.grid

    @property
    def degree(self) -> int:
        return self.plan.degree

    def _overrides(self, overrides):
        return self.bc_overrides + tuple(overrides or ())

    def periodize(self, values: np.ndarray, overrides=None, parity=None):
        """Return spline coefficients and the residual ``values - f_s``.

        ``parity=(left, right)`` with entries ``"even"``, ``"odd"`` or ``None``
        takes the boundary data from a mirror-image stencil on that side.
        """
        plan = self.plan
        d = plan.boundary_data(values, self._overrides(overrides), parity)
        P = plan.coefficients(values, d)
        return P, values - plan.basis.evaluate(P, 0)

    # Array-level operations along axis 0 of (N,) or (N, K) input.

    def derivative_values(self, values: np.ndarray, overrides=None, parity=None) -> np.ndarray:
        P, r = self.periodize(values, overrides, parity)
        return self.plan.basis.evaluate(P, 1) + spectral_derivative(self.workspace, r)

    def antiderivative_values(self, values: np.ndarray, bc=("a", 0.0), overrides=None) -> np.ndarray:
        P, r = self.periodize(values, overrides)
        out = self.plan.basis.integrate(P) + spectral_antiderivative(self.workspace, r)
        where, value = bc
        if where == "a":
            shift = value - out[0]
        elif where == "b":
            shift = value - out[-1]
        else:
            raise ValueError("bc location must be 'a' or 'b'")
        return out + shift

    def filter_values(self, values: np.ndarray, overrides=None, parity=None) -> np.ndarray:
        """Exponential filter applied to the periodic residual only."""
        P, r = self.periodize(values, overrides, parity)
        return self.plan.basis.evaluate(P, 0) + spectral_filter(self.workspace, r)

    def _check(self, f):
        v = _raw(f)
        if isinstance(f, Field) and f.grid != self.grid:
            raise ValueError("field is not sampled on the operator grid")
        if v.shape[0] != self.grid.n_points:
            raise DimensionMismatchError(f"expected {self.grid.n_points} samples along axis 0, got {v.shape[0]}")
        return v

    def _wrap(self, f, values):
        return Field(self.grid, values) if isinstance(f, Field) else values

    def differentiate(self, f, overrides=None):
        return self._wrap(f, self.derivative_values(self._check(f), overrides))

    def second_derivative(self, f, overrides=None):
        """Two first-derivative passes; ``overrides`` applies to the first pass only."""
        v = self._check(f)
        return self._wrap(f, self.derivative_values(self.derivative_values(v, overrides)))

    def antiderivative(self, fprime, bc=("a", 0.0), overrides=None):
        return self._wrap(fprime, self.antiderivative_values(self._check(fprime), bc, overrides))

    def filter(self, u, overrides=None):
        return self._wrap(u, self.filter_values(self._check(u), overrides))

    def mapped_points(self) -> np.ndarray:
        if self.map is None:
            return self.grid.points
        return self.map(self.grid.points)

    def _map_derivative(self):
        if self.map is None:
            return np.ones(self.grid.n_points)
        return self.map.derivative(self.grid.points)

    def differentiate_mapped(self, f_on_mapped, overrides=None):
        """``df/dxi = F'(x) / g'(x)`` with ``F(x) = f(g(x))`` sampled on the uniform grid."""
        v = self._check(f_on_mapped)
        dg = self._map_derivative()
        return self._wrap(f_on_mapped, self.derivative_values(v, overrides) / dg.reshape((-1,) + (1,) * (v.ndim - 1)))

    def antiderivative_mapped(self, f_on_mapped, bc=("a", 0.0), overrides=None):
        """``int f dxi = int F(x) g'(x) dx + S``; ``bc`` is given at the fixed endpoint."""
        v = self._check(f_on_mapped)
        dg = self._map_derivative().reshape((-1,) + (1,) * (v.ndim - 1))
        return self._wrap(f_on_mapped, self.antiderivative_values(v * dg, bc, overrides))

    def apply_along_axis(self, u: Field2D, axis: str = "x", operation: str = "differentiate", overrides=None, parity=None) -> Field2D:
        """Apply a 1D operation to every row (``axis="x"``) or column (``axis="y"``)."""
        values = _raw(u)
        if values.ndim != 2:
            raise DimensionMismatchError("apply_along_axis expects a 2D field")
        if axis == "x":
            lines = values.T
        elif axis == "y":
            lines = values
        else:
            raise ValueError("axis must be 'x' or 'y'")
        if lines.shape[0] != self.grid.n_points:
            raise DimensionMismatchError(f"axis {axis!r} has {lines.shape[0]} points, operator expects {self.grid.n_points}")
        if isinstance(u, Field2D):
            ax_grid = u.grid_x if axis == "x" else u.grid_y
            if ax_grid != self.grid:
                raise DimensionMismatchError(f"operator grid does not match the {axis} grid")
        fn = {
            "differentiate": self.derivative_values,
            "filter": self.filter_values,
        }.get(operation)
        if fn is None:
            raise ValueError(f"unsupported operation {operation!r}")
        out = fn(np.ascontiguousarray(lines), overrides, parity)
        out = out.T if axis == "x" else out
        return u.with_values(out) if isinstance(u, Field2D) else out


def make_operator(
    grid: Grid,
    p: int = 11,
    n: int = 44,
    m: int = 16,
    beta: Optional[float] = 3.0,
    lam: float = 0.0,
    map: Optional[GridMap] = None,
    bc_overrides: Sequence = (),
    filter_alpha: float = 36.0,
    filter_order: int = 36,
) -> BspfOperator:
    """Plan + workspace in one call; defaults are the noisy-benchmark settings."""
    plan = build_plan(grid, p, n, m, beta, lam)
    ws = make_workspace(grid, filter_alpha, filter_order)
    return BspfOperator(plan, ws, map, tuple(bc_overrides))


def differentiate(op: BspfOperator, f, overrides=None):
    return op.differentiate(f, overrides)


def antiderivative(op: BspfOperator, fprime, bc=("a", 0.0), overrides=None):
    return op.antiderivative(fprime, bc, overrides)


def differentiate_mapped(op: BspfOperator, f_on_mapped, overrides=None):
    return op.differentiate_mapped(f_on_mapped, overrides)


def antiderivative_mapped(op: BspfOperator, f_on_mapped, bc=("a", 0.0), overrides=None):
    return op.antiderivative_mapped(f_on_mapped, bc, overrides)


def apply_along_axis(op: BspfOperator, u, axis="x", operation="differentiate", overrides=None, parity=None):
    return op.apply_along_axis(u, axis, operation, overrides, parity)
