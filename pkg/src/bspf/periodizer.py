"""Boundary-matching spline fit: the precomputed plan and the coefficient solve.

Given samples ``f`` and endpoint derivatives ``d``, the spline coefficients
``P`` satisfy ``C P = d`` exactly and, when ``n > 2p``, minimize the
trapezoid-weighted misfit ``sum_j w_j (f_s(x_j) - f_j)^2 + lam |P|^2``.

The constraint rows at ``a`` only touch ``P_0..P_{p-1}`` and form a lower
triangular block; those at ``b`` only touch ``P_{n-p}..P_{n-1}``. The default
solve therefore fixes the end coefficients by triangular substitution and
fits the ``n - 2p`` interior coefficients by a QR least-squares solve. This
is algebraically the same as the bordered KKT system, but it does not go
through a ~1e18-conditioned matrix. The KKT route stays available as
``method="kkt"`` for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as sla

from ._colwise import matmul_long, solve_lower, solve_upper
from .boundary import (
    BoundaryData,
    BoundaryStencil,
    ConstraintMatrix,
    apply_bc_overrides,
    boundary_derivatives,
    build_constraint_matrix,
    build_stencil,
    mirror_boundary_derivatives,
)
from .bspline import BsplineBasis, build_design_matrices, build_knots
from .errors import InsufficientBasisError, SingularSystemError, SolverFailureError
from .grid import Field, Grid


def trapezoid_weights(grid: Grid) -> np.ndarray:
    w = np.full(grid.n_points, grid.spacing)
    w[0] = w[-1] = 0.5 * grid.spacing
    w.setflags(write=False)
    return w


@dataclass(frozen=True)
class SplineCoefficients:
    p_vec: np.ndarray
    multipliers: Optional[np.ndarray] = None


@dataclass(frozen=True, eq=False)
class PeriodizationPlan:
    basis: BsplineBasis
    stencil: BoundaryStencil
    constraint: ConstraintMatrix
    mode: str
    lam: float
    quad_weights: np.ndarray
    determined_factorization: Optional[tuple] = field(default=None, repr=False)
    # Elimination route: triangular end blocks and the interior QR factors.
    left_block: np.ndarray = field(default=None, repr=False)
    right_block: np.ndarray = field(default=None, repr=False)
    # Interior projector: Q^T of the weighted QR with sqrt(w) folded in, stored (n - 2p, N).
    ls_qt: Optional[np.ndarray] = field(default=None, repr=False)
    ls_r: Optional[np.ndarray] = field(default=None, repr=False)
    row_scale: np.ndarray = field(default=None, repr=False)

    @property
    def grid(self) -> Grid:
        return self.basis.grid

    @cached_property
    def kkt_factorization(self) -> tuple:
        # Built on demand: only the ``method="kkt"`` cross-check uses it, and at
        # high degree the bordered matrix is too ill-conditioned to be useful.
        kkt = sla.lu_factor(assemble_kkt(self, scaled=True))
        if not np.all(np.isfinite(kkt[0])):
            raise SingularSystemError("KKT factorization failed")
        return kkt

    @property
    def degree(self) -> int:
        return self.basis.degree

    @property
    def n_basis(self) -> int:
        return self.basis.n_basis

    @property
    def m(self) -> int:
        return self.stencil.m

    # Array-level apply stage; ``values`` is (N,) or (N, K).

    def boundary_data(self, values: np.ndarray, overrides: Sequence = (), parity=None) -> np.ndarray:
        """One-sided estimates, or mirror ones on a side with known ``parity=(left, right)``."""
        d = boundary_derivatives(self.stencil, values, self.degree)
        if parity is not None:
            p = self.degree
            for side, sl, kind in (("a", slice(0, p), parity[0]), ("b", slice(p, 2 * p), parity[1])):
                if kind is not None:
                    d[sl] = mirror_boundary_derivatives(self.grid, values, p, side, kind)
        if overrides:
            d = apply_bc_overrides(BoundaryData(d), overrides).d
        return d

    def coefficients(self, values: np.ndarray, d: np.ndarray) -> np.ndarray:
        p, n = self.degree, self.n_basis
        P = np.zeros((n,) + values.shape[1:])
        # Fixed-order substitutions keep batched and single-line results identical.
        P[:p] = solve_lower(self.left_block, d[:p])
        P[n - p :] = solve_lower(self.right_block, d[p:])[::-1]
        if n > 2 * p:
            fit = values - self.basis.evaluate(P, 0)
            rhs = matmul_long(self.ls_qt, fit)
            P[p : n - p] = solve_upper(self.ls_r, rhs)
        return P

    def coefficients_kkt(self, values: np.ndarray, d: np.ndarray) -> tuple[np.ndarray, Optional[np.ndarray]]:
        p, n = self.degree, self.n_basis
        ds = d * self.row_scale.reshape((-1,) + (1,) * (d.ndim - 1))
        if self.mode == "determined":
            return sla.lu_solve(self.determined_factorization, ds), None
        w = self.quad_weights.reshape((-1,) + (1,) * (values.ndim - 1))
        load = self.basis.design @ (w * values)
        sol = sla.lu_solve(self.kkt_factorization, np.concatenate([2.0 * load, ds], axis=0))
        # Undo the constraint-row equilibration on the multipliers.
        mu = sol[n:] * self.row_scale.reshape((-1,) + (1,) * (d.ndim - 1))
        return sol[:n], mu


def assemble_kkt(plan: PeriodizationPlan, scaled: bool = False) -> np.ndarray:
    """The bordered system ``[[2(Q + lam I), -C^T], [C, 0]]`` with ``Q = D W D^T``."""
    D, w = plan.basis.design, plan.quad_weights
    n, p = plan.n_basis, plan.degree
    C = plan.constraint.c * (plan.row_scale[:, None] if scaled else 1.0)
    Q = (D * w) @ D.T
    top = np.hstack([2.0 * (Q + plan.lam * np.eye(n)), -C.T])
    bottom = np.hstack([C, np.zeros((2 * p, 2 * p))])
    return np.vstack([top, bottom])


def build_plan(
    grid: Grid,
    p: int,
    n: int,
    m: int,
    beta: Optional[float] = None,
    lam: float = 0.0,
) -> PeriodizationPlan:
    """Precompute everything that does not depend on the sampled function."""
    p, n, m = int(p), int(n), int(m)
    if n < 2 * p:
        raise InsufficientBasisError(f"n={n} < 2p={2 * p}")
    if m < p:
        raise ValueError(f"stencil width m={m} must be >= degree p={p}")
    if m > grid.n_points:
        raise ValueError(f"stencil width m={m} exceeds grid size N={grid.n_points}")
    if lam < 0:
        raise ValueError("Tikhonov parameter must be non-negative")
    kv = build_knots(grid, p, n, beta)
    basis = build_design_matrices(kv, grid)
    stencil = build_stencil(grid, m)
    constraint = build_constraint_matrix(kv)
    w = trapezoid_weights(grid)
    C = constraint.c
    row_scale = 1.0 / np.max(np.abs(C), axis=1)

    left = np.array(C[:p, :p])
    right = np.array(C[p:, n - p :][:, ::-1])
    for blk in (left, right):
        if np.any(np.triu(blk, 1) != 0.0):
            raise SingularSystemError("end constraint block is not triangular; degenerate knots")
        if np.any(np.diag(blk) == 0.0):
            raise SingularSystemError("end constraint block is singular; degenerate knots")

    determined = ls_qt = ls_r = None
    if n == 2 * p:
        mode = "determined"
        determined = sla.lu_factor(C * row_scale[:, None])
    else:
        mode = "regularized"
        q = n - 2 * p
        sw = np.sqrt(w)
        A = (basis.design[p : n - p] * sw).T
        if lam > 0:
            A = np.vstack([A, np.sqrt(lam) * np.eye(q)])
        Qf, Rf = np.linalg.qr(A, mode="reduced")
        if np.min(np.abs(np.diag(Rf))) <= 1e-14 * np.max(np.abs(np.diag(Rf))):
            raise SingularSystemError("interior least-squares block is rank deficient")
        ls_qt = np.ascontiguousarray((Qf[: grid.n_points] * sw[:, None]).T)
        ls_r = Rf

    return PeriodizationPlan(
        basis=basis,
        stencil=stencil,
        constraint=constraint,
        mode=mode,
        lam=float(lam),
        quad_weights=w,
        determined_factorization=determined,
        left_block=left,
        right_block=right,
        ls_qt=ls_qt,
        ls_r=ls_r,
        row_scale=row_scale,
    )


def _values(plan: PeriodizationPlan, f) -> np.ndarray:
    if isinstance(f, Field):
        if f.grid != plan.grid:
            raise ValueError("field is not sampled on the plan grid")
        return f.values
    v = np.asarray(f, dtype=float)
    if v.shape[0] != plan.grid.n_points:
        raise ValueError("field is not sampled on the plan grid")
    return v


def solve_coefficients(plan: PeriodizationPlan, f, overrides: Sequence = (), method: str = "elimination") -> SplineCoefficients:
    """Spline coefficients of the boundary-matching fit of ``f``.

    ``method="kkt"`` solves the literal bordered system instead; it agrees
    with the default in exact arithmetic but loses accuracy for high degree.
    """
    values = _values(plan, f)
    d = plan.boundary_data(values, overrides)
    if method == "elimination":
        P, mu = plan.coefficients(values, d), None
    elif method == "kkt":
        P, mu = plan.coefficients_kkt(values, d)
    else:
        raise ValueError(f"unknown method {method!r}")
    if not np.all(np.isfinite(P)):
        raise SolverFailureError("spline coefficient solve produced non-finite values")
    return SplineCoefficients(P, mu)


def evaluate_spline(plan: PeriodizationPlan, coeffs: SplineCoefficients, deriv_order: int = 0) -> Field:
    if deriv_order not in (0, 1):
        raise ValueError("deriv_order must be 0 or 1")
    return Field(plan.grid, plan.basis.evaluate(coeffs.p_vec, deriv_order))


def spline_antiderivative(plan: PeriodizationPlan, coeffs: SplineCoefficients) -> Field:
    return Field(plan.grid, plan.basis.integrate(coeffs.p_vec))
