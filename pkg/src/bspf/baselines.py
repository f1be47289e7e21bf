"""Reference methods for the comparison studies.

Chebyshev collocation (transform recurrence, with the dense matrix kept as a
cross-check), cumulative Simpson integration, and a second-order centered
finite-difference shallow-water step.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .errors import CFLWarning, GridTooSmallError, InvalidDomainError
from .grid import Field, Field2D, Grid
from .kernels import swe_fd_rhs
from .pde.state import SweState


@dataclass(frozen=True)
class ChebyshevGrid:
    """Chebyshev-Gauss-Lobatto nodes mapped to ``[a, b]``.

    ``points[j] = (a+b)/2 - (b-a)/2 * cos(pi j / (N-1))``, so ``points`` ascend
    in ``x`` while the reference nodes ``xi_j = cos(pi j / (N-1))`` descend
    from 1 to -1. Index ``j`` is the same in both orderings.
    """

    a: float
    b: float
    n_points: int
    points: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)) or self.b <= self.a:
            raise InvalidDomainError(f"need a < b, got [{self.a}, {self.b}]")
        if self.n_points < 2:
            raise InvalidDomainError("need at least two Chebyshev points")
        pts = 0.5 * (self.a + self.b) - 0.5 * (self.b - self.a) * self.xi
        pts[0], pts[-1] = self.a, self.b
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def xi(self) -> np.ndarray:
        return np.cos(np.pi * np.arange(self.n_points) / (self.n_points - 1))

    @property
    def half_length(self) -> float:
        return 0.5 * (self.b - self.a)


def _cheb_raw(f):
    return f.values if isinstance(f, Field) else np.asarray(f, dtype=float)


def chebyshev_coefficients(values: np.ndarray) -> np.ndarray:
    """Coefficients ``c_k`` of ``f(xi) = sum_k c_k T_k(xi)`` from node values."""
    n = values.shape[0] - 1
    c = sfft.dct(values, type=1, axis=0) / n
    c[0] *= 0.5
    c[-1] *= 0.5
    return c


def chebyshev_values(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of :func:`chebyshev_coefficients`."""
    c = np.array(coeffs, dtype=float)
    c[0] *= 2.0
    c[-1] *= 2.0
    return 0.5 * sfft.dct(c, type=1, axis=0)


def _derivative_coefficients(c: np.ndarray) -> np.ndarray:
    # dc_{k-1} = dc_{k+1} + 2k c_k, i.e. a reverse cumulative sum over each parity class.
    n = c.shape[0] - 1
    dc = np.zeros_like(c)
    if n == 0:
        return dc
    w = 2.0 * np.arange(n + 1).reshape((-1,) + (1,) * (c.ndim - 1)) * c
    for start in (1, 2):
        seg = w[start::2]
        dc[start - 1 : n : 2] = np.cumsum(seg[::-1], axis=0)[::-1]
    dc[0] *= 0.5
    return dc


def chebyshev_differentiate(grid: ChebyshevGrid, f):
    """Derivative by the coefficient recurrence ``c'_{k-1} = c'_{k+1} + 2k c_k``."""
    v = _cheb_raw(f)
    if v.shape[0] != grid.n_points:
        raise ValueError("field is not sampled on the Chebyshev grid")
    dxi = chebyshev_values(_derivative_coefficients(chebyshev_coefficients(v)))
    # x increases as xi decreases: dx/dxi = -(b-a)/2.
    return -dxi / grid.half_length


def chebyshev_matrix(grid: ChebyshevGrid) -> np.ndarray:
    """Dense collocation differentiation matrix in ``x`` (negative-sum diagonal)."""
    n = grid.n_points - 1
    xi = grid.xi
    c = np.ones(n + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(n + 1)
    dX = xi[:, None] - xi[None, :]
    D = np.outer(c, 1.0 / c) / (dX + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))
    return -D / grid.half_length


def chebyshev_antiderivative(grid: ChebyshevGrid, fprime, bc=("a", 0.0)):
    """Antiderivative through the integrated coefficient series; constant fixed by ``bc``."""
    v = _cheb_raw(fprime)
    if v.shape[0] != grid.n_points:
        raise ValueError("field is not sampled on the Chebyshev grid")
    n = grid.n_points - 1
    c = chebyshev_coefficients(v)
    ce = np.concatenate([c, np.zeros((2,) + c.shape[1:])])
    C = np.zeros((n + 2,) + c.shape[1:])
    C[1] = ce[0] - 0.5 * ce[2]
    k = np.arange(2, n + 2).reshape((-1,) + (1,) * (c.ndim - 1))
    C[2:] = (ce[1 : n + 1] - ce[3 : n + 3]) / (2.0 * k)
    theta = np.pi * np.arange(n + 1) / n
    # Degree n+1 term is not representable on the nodes; evaluate it directly.
    g = chebyshev_values(C[: n + 1]) + np.cos((n + 1) * theta).reshape((-1,) + (1,) * (v.ndim - 1)) * C[n + 1]
    out = -grid.half_length * g
    where, value = bc
    if where == "a":
        out = out + (value - out[0])
    elif where == "b":
        out = out + (value - out[-1])
    else:
        raise ValueError("bc location must be 'a' or 'b'")
    return out


def simpson_integrate(grid: Grid, fprime, bc=("a", 0.0)):
    """Cumulative composite Simpson antiderivative on a uniform grid.

    Even-index points use whole Simpson panels. Each odd-index point adds
    the integral over one cell of the cubic through four neighbouring
    samples, so the result is exact for cubics at every node.
    """
    f = fprime.values if isinstance(fprime, Field) else np.asarray(fprime, dtype=float)
    n = grid.n_points
    if n < 3:
        raise GridTooSmallError(f"Simpson integration needs N >= 3, got {n}")
    if f.shape[0] != n:
        raise ValueError("field is not sampled on the grid")
    h = grid.spacing
    out = np.zeros_like(f)
    npan = (n - 1) // 2
    panels = h / 3.0 * (f[0 : 2 * npan : 2] + 4.0 * f[1 : 2 * npan : 2] + f[2 : 2 * npan + 1 : 2])
    out[2 : 2 * npan + 1 : 2] = np.cumsum(panels, axis=0)
    odd = np.arange(1, n, 2)
    if n == 3:
        out[1] = h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2])
    else:
        fwd = odd[odd + 2 <= n - 1]
        out[fwd] = out[fwd - 1] + h / 24.0 * (9.0 * f[fwd - 1] + 19.0 * f[fwd] - 5.0 * f[fwd + 1] + f[fwd + 2])
        for j in odd[odd + 2 > n - 1]:
            # Last cell: the cubic through the four trailing samples.
            out[j] = out[j - 1] + h / 24.0 * (f[j - 3] - 5.0 * f[j - 2] + 19.0 * f[j - 1] + 9.0 * f[j])
    where, value = bc
    if where == "a":
        out = out + (value - out[0])
    elif where == "b":
        out = out + (value - out[-1])
    else:
        raise ValueError("bc location must be 'a' or 'b'")
    return Field(grid, out) if isinstance(fprime, Field) else out


@dataclass(frozen=True)
class FdSweParams:
    gravity: float = 9.81
    manning_alpha: float = 0.025


def _rk4(q, h, dt, dx, dy, g, alpha):
    k1 = swe_fd_rhs(q, h, dx, dy, g, alpha)
    k2 = swe_fd_rhs(q + 0.5 * dt * k1, h, dx, dy, g, alpha)
    k3 = swe_fd_rhs(q + 0.5 * dt * k2, h, dx, dy, g, alpha)
    k4 = swe_fd_rhs(q + dt * k3, h, dx, dy, g, alpha)
    return q + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def check_cfl(q: np.ndarray, h: np.ndarray, dt: float, dx: float, g: float) -> float:
    courant = dt * np.sqrt(g * np.max(h + q[0])) / dx
    if courant > 1.0:
        warnings.warn(f"CFL number {courant:.3f} exceeds 1", CFLWarning, stacklevel=3)
    return courant


def fd_swe_step(state: SweState, bathymetry, dt: float, params: FdSweParams = FdSweParams()) -> SweState:
    """One classical RK4 step of the centered second-order FD shallow-water scheme."""
    gx, gy = state.eta.grid_x, state.eta.grid_y
    h = bathymetry.values if isinstance(bathymetry, Field2D) else np.asarray(bathymetry, dtype=float)
    q = state.stacked()
    check_cfl(q, h, dt, gx.spacing, params.gravity)
    q = _rk4(q, h, dt, gx.spacing, gy.spacing, params.gravity, params.manning_alpha)
    return SweState.from_stacked(q, gx, gy)


def fd_swe_run(q0: np.ndarray, h: np.ndarray, dx: float, dy: float, dt: float, n_steps: int, params: FdSweParams = FdSweParams()) -> np.ndarray:
    """Array-level loop of :func:`fd_swe_step` for long reference runs."""
    q = np.array(q0, dtype=float)
    check_cfl(q, h, dt, dx, params.gravity)
    for _ in range(n_steps):
        q = _rk4(q, h, dt, dx, dy, params.gravity, params.manning_alpha)
    return q
