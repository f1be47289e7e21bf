"""Uniform grids, analytic coordinate maps and sampled fields."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidDomainError,
    NonFiniteSampleError,
    NonMonotoneMapError,
)

_ENDPOINT_TOL = 1e-12


def _frozen(arr):
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Grid:
    """``n_points`` equispaced samples of ``[a, b]``, both endpoints included."""

    a: float
    b: float
    n_points: int
    points: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)) or self.b <= self.a:
            raise InvalidDomainError(f"need finite a < b, got a={self.a}, b={self.b}")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise InvalidDomainError(f"need n_points >= 2, got {self.n_points}")
        object.__setattr__(self, "n_points", int(self.n_points))
        x = self.a + np.arange(self.n_points) * self.spacing
        x[-1] = self.b
        object.__setattr__(self, "points", _frozen(x))

    @property
    def spacing(self) -> float:
        return (self.b - self.a) / (self.n_points - 1)

    @property
    def length(self) -> float:
        return self.b - self.a

    def point(self, j: int) -> float:
        return float(self.points[j])

    def __len__(self):
        return self.n_points


def make_grid(a: float, b: float, n: int) -> Grid:
    return Grid(float(a), float(b), n)


@dataclass(frozen=True)
class GridMap:
    """Analytic map ``xi = g(x)`` of ``[a, b]`` onto itself with known ``g'``.

    ``forward`` and ``derivative`` must accept numpy arrays.
    """

    a: float
    b: float
    forward: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    label: str = "map"

    def __post_init__(self):
        ga = float(self.forward(np.array([self.a]))[0])
        gb = float(self.forward(np.array([self.b]))[0])
        scale = max(1.0, abs(self.a), abs(self.b))
        if abs(ga - self.a) > _ENDPOINT_TOL * scale or abs(gb - self.b) > _ENDPOINT_TOL * scale:
            raise InvalidDomainError(
                f"map must fix the endpoints: g(a)={ga!r} (a={self.a}), g(b)={gb!r} (b={self.b})"
            )

    def __call__(self, x):
        return self.forward(np.asarray(x, dtype=float))

    def check_monotone(self, x: np.ndarray) -> None:
        dg = self.derivative(np.asarray(x, dtype=float))
        if not np.all(np.isfinite(dg)) or np.any(dg <= 0.0):
            raise NonMonotoneMapError(f"map derivative is not positive on the grid (min g' = {np.min(dg):.3e})")

    def inverse(self, xi, tol: float = 1e-14, max_iter: int = 200) -> np.ndarray:
        """Vectorized bisection for ``g(x) = xi``; ``g`` must be increasing."""
        xi = np.asarray(xi, dtype=float)
        lo = np.full(xi.shape, self.a)
        hi = np.full(xi.shape, self.b)
        for _ in range(max_iter):
            mid = 0.5 * (lo + hi)
            below = self.forward(mid) < xi
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.max(hi - lo, initial=0.0) <= tol * (self.b - self.a):
                break
        return 0.5 * (lo + hi)


def identity_map(grid: Grid) -> GridMap:
    return GridMap(grid.a, grid.b, lambda x: np.asarray(x, dtype=float).copy(), lambda x: np.ones_like(x, dtype=float), "identity")


def make_sigmoid_composite_map(
    grid: Grid,
    centers: Sequence[float],
    widths: Sequence[float],
    strengths: Sequence[float],
) -> GridMap:
    """Grid map refining near each center by superposed tanh sigmoids.

    Before renormalization ``g(x) = x - sum_i s_i w_i tanh((x - c_i)/w_i)`` so
    that ``g'(x) = 1 - sum_i s_i sech^2((x - c_i)/w_i)``: strength ``s_i`` is the
    fractional reduction of the local spacing at ``c_i``. An affine rescale then
    pins ``g(a) = a`` and ``g(b) = b``.
    """
    if not (len(centers) == len(widths) == len(strengths)):
        raise ValueError("centers, widths and strengths must have equal length")
    if len(centers) == 0:
        m = identity_map(grid)
        return m
    c = np.asarray(centers, dtype=float)
    w = np.asarray(widths, dtype=float)
    s = np.asarray(strengths, dtype=float)
    if np.any(w <= 0):
        raise ValueError("sigmoid widths must be positive")
    a, b = grid.a, grid.b

    def raw(x):
        x = np.asarray(x, dtype=float)
        z = (x[..., None] - c) / w
        return x - np.sum(s * w * np.tanh(z), axis=-1)

    def draw(x):
        x = np.asarray(x, dtype=float)
        z = (x[..., None] - c) / w
        return 1.0 - np.sum(s / np.cosh(z) ** 2, axis=-1)

    ga, gb = float(raw(np.array([a]))[0]), float(raw(np.array([b]))[0])
    if gb <= ga:
        raise NonMonotoneMapError("composite sigmoid map is not increasing")
    scale = (b - a) / (gb - ga)

    def forward(x):
        out = a + (raw(x) - ga) * scale
        return out

    def derivative(x):
        return draw(x) * scale

    probe = np.linspace(a, b, 10 * grid.n_points)
    if np.min(derivative(probe)) <= 0.0:
        raise NonMonotoneMapError(
            f"sigmoid map derivative changes sign (min g' = {np.min(derivative(probe)):.3e})"
        )

    # Pin endpoints exactly; the affine map only fixes them up to rounding.
    def pinned(x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(forward(x), dtype=float)
        out = np.where(x == a, a, out)
        return np.where(x == b, b, out)

    label = "sigmoid(" + ", ".join(f"c={ci:g},w={wi:g},s={si:g}" for ci, wi, si in zip(c, w, s)) + ")"
    gmap = GridMap(a, b, pinned, derivative, label)
    gmap.check_monotone(grid.points)
    return gmap


@dataclass(frozen=True)
class Field:
    """Samples of a function on a :class:`Grid`."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n_points,):
            raise DimensionMismatchError(f"expected {self.grid.n_points} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise NonFiniteSampleError("field values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def x(self) -> np.ndarray:
        return self.grid.points

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __len__(self):
        return self.grid.n_points

    def with_values(self, values) -> "Field":
        return Field(self.grid, values)


@dataclass(frozen=True)
class Field2D:
    """Samples on a tensor grid; ``values[j, i]`` sits at ``(x_i, y_j)``."""

    grid_x: Grid
    grid_y: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        expected = (self.grid_y.n_points, self.grid_x.n_points)
        if v.shape != expected:
            raise DimensionMismatchError(f"expected shape {expected}, got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def shape(self):
        return self.values.shape

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def with_values(self, values) -> "Field2D":
        return Field2D(self.grid_x, self.grid_y, values)


def sample(grid: Grid, fn: Callable) -> Field:
    """Evaluate ``fn`` on the grid points (vectorized call first, then pointwise)."""
    x = grid.points
    try:
        values = np.asarray(fn(x), dtype=float)
        if values.shape != x.shape:
            values = np.broadcast_to(values, x.shape).astype(float)
    except (TypeError, ValueError):
        values = np.array([float(fn(float(xj))) for xj in x])
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise NonFiniteSampleError(f"non-finite sample at x[{bad}] = {x[bad]!r}")
    return Field(grid, values)


def sample_2d(grid_x: Grid, grid_y: Grid, fn: Callable) -> Field2D:
    X, Y = np.meshgrid(grid_x.points, grid_y.points)
    return Field2D(grid_x, grid_y, np.broadcast_to(np.asarray(fn(X, Y), dtype=float), X.shape))


def write_field_csv(path, f: Field, x=None) -> None:
    """Two columns ``x,value``; ``x`` overrides the coordinates (mapped grids)."""
    xs = f.grid.points if x is None else np.asarray(x)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "value"])
        for xi, vi in zip(xs, f.values):
            w.writerow([repr(float(xi)), f"{vi:.17e}"])


def read_field_csv(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1]


def write_field2d_csv(path, f: Field2D) -> None:
    """Header ``y\\x,x_0,...``; each row starts with its y coordinate."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["y\\x"] + [repr(float(v)) for v in f.grid_x.points])
        for yj, row in zip(f.grid_y.points, f.values):
            w.writerow([repr(float(yj))] + [f"{v:.17e}" for v in row])


def read_field2d_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    x = np.array([float(v) for v in header[1:]])
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return x, data[:, 0], data[:, 1:]
