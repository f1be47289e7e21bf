"""Viscous Burgers equation ``u_t + u u_x = nu u_xx`` with a travelling-front solution.

The exact solution is ``u = b - a tanh(eta / 2)`` with
``eta = (a / nu) (x - b t - c)``, which is the same as
``(a + b + (b - a) e^eta) / (1 + e^eta)`` but never overflows. The front
moves at speed ``b`` from level ``a + b`` (left) to ``b - a`` (right).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..baselines import ChebyshevGrid, chebyshev_differentiate
from ..grid import Field, Grid, make_grid
from ..operators import BspfOperator, make_operator
from .integrators import Trajectory, integrate_rk45


@dataclass(frozen=True)
class BurgersConfig:
    a_amp: float = 0.4
    b_amp: float = 0.6
    c_shift: float = np.pi
    nu: float = 0.01
    t_end: float = 2.0
    n: int = 800
    length: float = 2.0 * np.pi
    p: int = 8
    n_basis: int = 32
    m: int = 8
    beta: Optional[float] = None
    use_filter: bool = True
    rel_tol: float = 1e-12
    abs_tol: float = 1e-12
    n_snapshots: int = 9

    def __post_init__(self):
        if self.nu <= 0:
            raise ValueError("nu must be positive")
        if self.b_amp <= self.a_amp:
            raise ValueError("need b_amp > a_amp")

    @property
    def grid(self) -> Grid:
        return make_grid(0.0, self.length, self.n)

    def make_operator(self) -> BspfOperator:
        return make_operator(self.grid, self.p, self.n_basis, self.m, self.beta)

    @property
    def snapshot_times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_end, self.n_snapshots)

    def front_position(self, t):
        return self.c_shift + self.b_amp * t


def _phase(cfg: BurgersConfig, x, t):
    return (cfg.a_amp / cfg.nu) * (np.asarray(x, dtype=float) - cfg.b_amp * t - cfg.c_shift)


def burgers_exact(cfg: BurgersConfig, x, t):
    return cfg.b_amp - cfg.a_amp * np.tanh(0.5 * _phase(cfg, x, t))


def burgers_exact_dt(cfg: BurgersConfig, x, t):
    s = 1.0 / np.cosh(0.5 * _phase(cfg, x, t))
    return 0.5 * cfg.a_amp**2 * cfg.b_amp / cfg.nu * s * s


def burgers_exact_dx(cfg: BurgersConfig, x, t):
    return -burgers_exact_dt(cfg, x, t) / cfg.b_amp


def burgers_rhs(cfg: BurgersConfig, op: BspfOperator, u, t: float):
    """``nu u_xx - u u_x`` with the exact Dirichlet values imposed on ``u_x``'s spline.

    The two boundary nodes carry the exact time derivative, which keeps
    them on the Dirichlet data.
    """
    v = u.values if isinstance(u, Field) else np.asarray(u, dtype=float)
    x0, x1 = op.grid.a, op.grid.b
    p = op.degree
    ux = op.derivative_values(v, [(0, burgers_exact(cfg, x0, t)), (p, burgers_exact(cfg, x1, t))])
    uxx = op.derivative_values(ux)
    r = cfg.nu * uxx - v * ux
    r[0] = burgers_exact_dt(cfg, x0, t)
    r[-1] = burgers_exact_dt(cfg, x1, t)
    return Field(op.grid, r) if isinstance(u, Field) else r


@dataclass
class BurgersResult:
    config: BurgersConfig
    x: np.ndarray
    times: np.ndarray
    u: np.ndarray
    errors: np.ndarray
    trajectory: Trajectory = field(repr=False)

    @property
    def max_error(self) -> float:
        return float(np.max(self.errors))

    def error_locations(self) -> np.ndarray:
        return self.x[np.argmax(self.errors, axis=1)]


def _post_filter(cfg, op):
    if not cfg.use_filter:
        return None
    p = op.degree

    def post(t, u):
        out = op.filter_values(u, [(0, burgers_exact(cfg, op.grid.a, t)), (p, burgers_exact(cfg, op.grid.b, t))])
        out[0], out[-1] = u[0], u[-1]
        return out

    return post


def run(cfg: BurgersConfig = BurgersConfig(), op: Optional[BspfOperator] = None, t_eval=None) -> BurgersResult:
    op = op or cfg.make_operator()
    x = op.grid.points
    times = cfg.snapshot_times if t_eval is None else np.asarray(t_eval, dtype=float)
    traj = integrate_rk45(
        lambda t, u: burgers_rhs(cfg, op, u, t),
        burgers_exact(cfg, x, 0.0),
        (0.0, float(times[-1])),
        cfg.rel_tol,
        cfg.abs_tol,
        t_eval=times,
        post_step=_post_filter(cfg, op),
    )
    u = traj.states
    err = np.abs(u - np.stack([burgers_exact(cfg, x, t) for t in traj.t]))
    return BurgersResult(cfg, x, traj.t, u, err, traj)


def run_chebyshev(cfg: BurgersConfig, t_eval) -> BurgersResult:
    """Chebyshev collocation counterpart, same integrator, no filter."""
    grid = ChebyshevGrid(0.0, cfg.length, cfg.n)
    x = grid.points

    def rhs(t, u):
        ux = chebyshev_differentiate(grid, u)
        r = cfg.nu * chebyshev_differentiate(grid, ux) - u * ux
        r[0] = burgers_exact_dt(cfg, x[0], t)
        r[-1] = burgers_exact_dt(cfg, x[-1], t)
        return r

    times = np.asarray(t_eval, dtype=float)
    traj = integrate_rk45(rhs, burgers_exact(cfg, x, 0.0), (0.0, float(times[-1])), cfg.rel_tol, cfg.abs_tol, t_eval=times)
    u = traj.states
    err = np.abs(u - np.stack([burgers_exact(cfg, x, t) for t in traj.t]))
    return BurgersResult(cfg, x, traj.t, u, err, traj)
