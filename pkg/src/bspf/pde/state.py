from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DryingError
from ..grid import Field2D, Grid, make_grid


@dataclass(frozen=True)
class SweState:
    """Surface elevation ``eta`` and discharge fluxes ``mm`` (x) and ``nn`` (y)."""

    eta: Field2D
    mm: Field2D
    nn: Field2D

    def stacked(self) -> np.ndarray:
        return np.stack([self.eta.values, self.mm.values, self.nn.values])

    @classmethod
    def from_stacked(cls, q: np.ndarray, grid_x: Grid, grid_y: Grid) -> "SweState":
        return cls(Field2D(grid_x, grid_y, q[0]), Field2D(grid_x, grid_y, q[1]), Field2D(grid_x, grid_y, q[2]))

    def check_depth(self, h: np.ndarray) -> None:
        H = h + self.eta.values
        if np.any(H <= 0):
            raise DryingError(f"total depth non-positive (min H = {H.min():.3e})")


def continental_shelf(x):
    """Sea floor depth ``50 - 25 tanh((x - 50) / 10)`` in metres."""
    return 50.0 - 25.0 * np.tanh((np.asarray(x) - 50.0) / 10.0)


def gaussian_hump(x, y, x0=50.0, y0=50.0, scale=10.0):
    return np.exp(-((x - x0) ** 2) / scale - ((y - y0) ** 2) / scale)


@dataclass(frozen=True)
class SweConfig:
    length: float = 100.0
    n: int = 201
    dt: float = 1e-3
    t_end: float = 2.0
    manning_alpha: float = 0.025
    gravity: float = 9.81
    p: int = 8
    n_basis: int = 32
    m: int = 8
    beta: float | None = None
    use_filter: bool = True
    filter_alpha: float = 36.0
    filter_order: int = 36
    snapshot_every: int = 500
    flat_bottom: float | None = None
    wall_bc: str = "mirror"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.manning_alpha < 0:
            raise ValueError("manning_alpha must be non-negative")
        if self.wall_bc not in ("mirror", "parity", "dirichlet"):
            raise ValueError("wall_bc must be 'mirror', 'parity' or 'dirichlet'")

    @property
    def grid(self) -> Grid:
        return make_grid(0.0, self.length, self.n)

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def bathymetry(self) -> np.ndarray:
        g = self.grid
        X, _ = np.meshgrid(g.points, g.points)
        if self.flat_bottom is not None:
            return np.full(X.shape, float(self.flat_bottom))
        return continental_shelf(X)

    def initial_state(self) -> SweState:
        g = self.grid
        X, Y = np.meshgrid(g.points, g.points)
        eta = gaussian_hump(X, Y)
        z = np.zeros_like(eta)
        return SweState(Field2D(g, g, eta), Field2D(g, g, z), Field2D(g, g, z))
