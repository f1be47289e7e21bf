"""Benchmark studies: test function, noise, convergence sweeps and timing."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .baselines import ChebyshevGrid, chebyshev_antiderivative, chebyshev_differentiate, simpson_integrate
from .grid import make_grid, make_sigmoid_composite_map
from .operators import make_operator

METHODS = ("bspf", "chebyshev", "simpson", "fd")


@dataclass(frozen=True)
class NoiseSpec:
    """Random cosine sum ``sum_i A_i cos(kappa_i x + phi_i)``.

    Draws come from ``numpy.random.default_rng(seed)`` (PCG64) in the fixed
    order: all ``kappa``, then all ``A``, then all ``phi``.
    """

    n_modes: int = 1000
    freq_range: tuple = (1.0, 100.0)
    amp_range: tuple = (0.0, 0.01)
    phase_range: tuple = (0.0, 2.0 * np.pi)
    seed: int = 0

    def __post_init__(self):
        if self.n_modes <= 0:
            raise ValueError("n_modes must be positive")
        for r in (self.freq_range, self.amp_range, self.phase_range):
            if not r[0] <= r[1]:
                raise ValueError(f"range {r} is not ordered")

    def draw(self):
        rng = np.random.default_rng(self.seed)
        kappa = rng.uniform(*self.freq_range, self.n_modes)
        amp = rng.uniform(*self.amp_range, self.n_modes)
        phi = rng.uniform(*self.phase_range, self.n_modes)
        return kappa, amp, phi


def _smooth(x):
    return np.sin(x / (1.02 + np.cos(x)))


def _smooth_dx(x):
    den = 1.02 + np.cos(x)
    return np.cos(x / den) * (den + x * np.sin(x)) / den**2


def make_test_function(noise: Optional[NoiseSpec] = None) -> tuple[Callable, Callable]:
    """``f = sin(x / (1.02 + cos x)) + eps(x)`` and its exact derivative."""
    if noise is None:
        return _smooth, _smooth_dx
    kappa, amp, phi = noise.draw()

    def _sum(x, fn):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        # Chunked to bound the (points x modes) temporary.
        for s in range(0, len(kappa), 250):
            k, A, p = kappa[s : s + 250], amp[s : s + 250], phi[s : s + 250]
            out += fn(x[..., None] * k + p, k, A).sum(axis=-1)
        return out

    def f(x):
        return _smooth(x) + _sum(x, lambda arg, k, A: A * np.cos(arg))

    def fprime(x):
        return _smooth_dx(x) + _sum(x, lambda arg, k, A: -A * k * np.sin(arg))

    return f, fprime


@dataclass
class ExperimentConfig:
    experiment: str = "diff-bench"
    method: str = "bspf"
    p: int = 11
    n: int = 44
    m: int = 16
    beta: Optional[float] = 3.0
    lam: float = 0.0
    sizes: list = field(default_factory=lambda: [1000, 1500, 2000, 2500, 3000])
    seed: Optional[int] = 0
    noise: bool = True
    repeats: int = 5
    a: float = 0.0
    b: float = 2.0 * np.pi
    map_centers: list = field(default_factory=lambda: [0.0, np.pi, 2.0 * np.pi])
    map_widths: list = field(default_factory=lambda: [0.5, 1.2, 0.5])
    map_strengths: list = field(default_factory=lambda: [0.6, 0.9, 0.6])
    out: str = "results"
    pde: dict = field(default_factory=dict)

    def noise_spec(self) -> Optional[NoiseSpec]:
        return NoiseSpec(seed=self.seed if self.seed is not None else 0) if self.noise else None

    def to_dict(self) -> dict:
        return asdict(self)


def _timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


def diff_error(method: str, N: int, cfg: ExperimentConfig, f, fprime, use_map: bool = False) -> tuple[float, float]:
    """Max error of the derivative, excluding the last grid point for BSPF."""
    if method == "bspf":
        grid = make_grid(cfg.a, cfg.b, N)
        gmap = None
        if use_map:
            gmap = make_sigmoid_composite_map(grid, cfg.map_centers, cfg.map_widths, cfg.map_strengths)
        op = make_operator(grid, cfg.p, cfg.n, cfg.m, cfg.beta, cfg.lam, map=gmap)
        x = op.mapped_points()
        v = f(x)
        d, wall = _timed(lambda: op.differentiate_mapped(v) if gmap else op.differentiate(v))
        return float(np.max(np.abs(d - fprime(x))[:-1])), wall
    if method == "chebyshev":
        grid = ChebyshevGrid(cfg.a, cfg.b, N)
        x = grid.points
        v = f(x)
        d, wall = _timed(lambda: chebyshev_differentiate(grid, v))
        return float(np.max(np.abs(d - fprime(x)))), wall
    raise ValueError(f"method {method!r} does not support differentiation")


def int_error(method: str, N: int, cfg: ExperimentConfig, f, fprime) -> tuple[float, float]:
    """Discrete L2 (root-mean-square) error of the antiderivative with ``f(a)`` given."""
    if method == "chebyshev":
        grid = ChebyshevGrid(cfg.a, cfg.b, N)
        x = grid.points
        v, bc = fprime(x), ("a", float(f(np.array([cfg.a]))[0]))
        F, wall = _timed(lambda: chebyshev_antiderivative(grid, v, bc))
        return float(np.sqrt(np.mean((F - f(x)) ** 2))), wall
    grid = make_grid(cfg.a, cfg.b, N)
    x = grid.points
    v, bc = fprime(x), ("a", float(f(np.array([cfg.a]))[0]))
    if method == "bspf":
        op = make_operator(grid, cfg.p, cfg.n, cfg.m, cfg.beta, cfg.lam)
        F, wall = _timed(lambda: op.antiderivative(v, bc))
    elif method == "simpson":
        F, wall = _timed(lambda: simpson_integrate(grid, v, bc))
    else:
        raise ValueError(f"method {method!r} does not support integration")
    return float(np.sqrt(np.mean((F - f(x)) ** 2))), wall


def fit_slope(sizes: Sequence[float], errors: Sequence[float]) -> float:
    return float(np.polyfit(np.log(sizes), np.log(errors), 1)[0])


def run_convergence(cfg: ExperimentConfig, methods: Optional[Sequence[str]] = None) -> dict:
    """Error sweep over ``cfg.sizes``; returns rows plus per-method fitted slopes."""
    f, fprime = make_test_function(cfg.noise_spec())
    methods = list(methods or [cfg.method])
    rows, partial = [], False
    for method in methods:
        for N in cfg.sizes:
            try:
                if cfg.experiment == "int-bench":
                    err, wall = int_error(method, N, cfg, f, fprime)
                else:
                    err, wall = diff_error(method, N, cfg, f, fprime, use_map=cfg.experiment == "map-bench")
            except Exception as exc:  # noqa: BLE001 - any module error ends the sweep
                partial = True
                return {"rows": rows, "slopes": _slopes(rows), "partial": partial, "error": repr(exc)}
            rows.append({"N": N, "method": method, "error": err, "wall_time": wall})
    return {"rows": rows, "slopes": _slopes(rows), "partial": partial}


def _slopes(rows):
    out = {}
    for method in {r["method"] for r in rows}:
        pts = [(r["N"], r["error"]) for r in rows if r["method"] == method and r["error"] > 0]
        if len(pts) >= 2:
            out[method] = fit_slope(*zip(*pts))
    return out


def time_derivative(method: str, N: int, cfg: ExperimentConfig, repeats: int) -> float:
    """Median wall time of one derivative evaluation (setup excluded)."""
    if method == "bspf":
        grid = make_grid(cfg.a, cfg.b, N)
        op = make_operator(grid, cfg.p, cfg.n, cfg.m, cfg.beta, cfg.lam)
        v = np.sin(grid.points)
        call = lambda: op.derivative_values(v)  # noqa: E731
    elif method == "chebyshev":
        grid = ChebyshevGrid(cfg.a, cfg.b, N)
        v = np.sin(grid.points)
        call = lambda: chebyshev_differentiate(grid, v)  # noqa: E731
    else:
        raise ValueError(f"method {method!r} has no timing harness")
    call()
    times = []
    for _ in range(repeats):
        t = time.perf_counter()
        call()
        times.append(time.perf_counter() - t)
    return float(np.median(times))


def run_timing(cfg: ExperimentConfig, methods: Optional[Sequence[str]] = None) -> dict:
    methods = list(methods or [cfg.method])
    rows = []
    for method in methods:
        for N in cfg.sizes:
            rows.append({"N": N, "method": method, "wall_time": time_derivative(method, N, cfg, cfg.repeats)})
    exps = {}
    for method in methods:
        pts = [(r["N"], r["wall_time"]) for r in rows if r["method"] == method]
        if len(pts) >= 2:
            n, t = map(np.array, zip(*pts))
            exps[method] = fit_slope(n * np.log(n), t)
    return {"rows": rows, "nlogn_exponent": exps}


def nlogn_ratio(rows, method: str) -> float:
    """Ratio of ``t / (N log N)`` between the two largest sizes."""
    pts = sorted((r["N"], r["wall_time"]) for r in rows if r["method"] == method)
    (n1, t1), (n2, t2) = pts[-2], pts[-1]
    r1, r2 = t1 / (n1 * np.log(n1)), t2 / (n2 * np.log(n2))
    return max(r1, r2) / min(r1, r2)
