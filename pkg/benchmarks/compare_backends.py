"""Compare the numba kernels with their pure-numpy fallbacks.

    python3 benchmarks/compare_backends.py [--repeats 5]

The library picks one at import time from ``BSPF_BACKEND`` (``numba`` or
``numpy``); this script calls both directly, checks they agree and reports
median wall times.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from bspf import kernels
from bspf.bspline import build_design_matrices, build_knots
from bspf.grid import make_grid
from bspf.pde.state import SweConfig


def median_time(fn, repeats):
    fn()  # warm-up (and JIT compile)
    out = []
    for _ in range(repeats):
        t = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t)
    return float(np.median(out))


def bench_basis(n_points, repeats):
    grid = make_grid(0.0, 2.0 * np.pi, n_points)
    kv = build_knots(grid, 11, 44, 3.0)
    x = grid.points
    a = kernels.basis_local_derivatives_numba(kv.knots, 11, 44, x, 1)
    b = kernels.basis_local_derivatives_numpy(kv.knots, 11, 44, x, 1)
    diff = float(np.max(np.abs(a[1] - b[1])))
    tn = median_time(lambda: kernels.basis_local_derivatives_numba(kv.knots, 11, 44, x, 1), repeats)
    tp = median_time(lambda: kernels.basis_local_derivatives_numpy(kv.knots, 11, 44, x, 1), repeats)
    return tn, tp, diff


def bench_swe(n, repeats):
    cfg = SweConfig(n=n)
    q = cfg.initial_state().stacked()
    q[1] = 0.1 * q[0]
    h = cfg.bathymetry()
    dx = cfg.grid.spacing
    args = (h, dx, dx, 9.81, 0.025)
    diff = float(np.max(np.abs(kernels.swe_fd_rhs_numba(q, *args) - kernels.swe_fd_rhs_numpy(q, *args))))
    tn = median_time(lambda: kernels.swe_fd_rhs_numba(q, *args), repeats)
    tp = median_time(lambda: kernels.swe_fd_rhs_numpy(q, *args), repeats)
    return tn, tp, diff


def bench_spline_sum(n_points, n_cols, repeats):
    grid = make_grid(0.0, 2.0 * np.pi, n_points)
    basis = build_design_matrices(build_knots(grid, 11, 44, 3.0), grid)
    idx, w = basis.index_t, basis.local_t[1]
    c = np.random.default_rng(0).normal(size=(44, n_cols))
    diff = float(np.max(np.abs(kernels.spline_sum_numba(idx, w, c) - kernels.spline_sum_numpy(idx, w, c))))
    tn = median_time(lambda: kernels.spline_sum_numba(idx, w, c), repeats)
    tp = median_time(lambda: kernels.spline_sum_numpy(idx, w, c), repeats)
    return tn, tp, diff


_END_TO_END = """
import time, numpy as np
from bspf.grid import make_grid
from bspf.operators import make_operator
g = make_grid(0.0, 2 * np.pi, {n})
op = make_operator(g, 11, 44, 16, 3.0)
v = np.sin(g.points)
op.derivative_values(v)
ts = []
for _ in range({r}):
    t = time.perf_counter(); op.derivative_values(v); ts.append(time.perf_counter() - t)
print(np.median(ts))
"""


def end_to_end(n, repeats, backend):
    env = dict(os.environ, BSPF_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", _END_TO_END.format(n=n, r=repeats)], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.split()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':<24}{'size':>8}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>9}{'max diff':>11}")
    for n in (2000, 20000, 200000):
        tn, tp, d = bench_basis(n, args.repeats)
        print(f"{'basis derivatives':<24}{n:>8}{tn:>12.2e}{tp:>12.2e}{tp / tn:>9.1f}{d:>11.1e}")
    for n in (201, 801, 1601):
        tn, tp, d = bench_swe(n, args.repeats)
        print(f"{'fd shallow-water rhs':<24}{n:>8}{tn:>12.2e}{tp:>12.2e}{tp / tn:>9.1f}{d:>11.1e}")
    for n, k in ((65536, 1), (201, 603)):
        tn, tp, d = bench_spline_sum(n, k, args.repeats)
        print(f"{'spline sum':<24}{f'{n}x{k}':>8}{tn:>12.2e}{tp:>12.2e}{tp / tn:>9.1f}{d:>11.1e}")
    for n in (4096, 65536):
        tn, tp = end_to_end(n, args.repeats, "numba"), end_to_end(n, args.repeats, "numpy")
        print(f"{'derivative end to end':<24}{n:>8}{tn:>12.2e}{tp:>12.2e}{tp / tn:>9.1f}{'':>11}")


if __name__ == "__main__":
    main()
