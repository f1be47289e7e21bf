"""Time integrators: adaptive Dormand-Prince 5(4) and classical fixed-step RK4."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ..errors import NaNDetectedError, StepUnderflowError

# Dormand-Prince tableau.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B - _B4


@dataclass
class Trajectory:
    t: np.ndarray
    y: list
    nfev: int = 0
    n_accepted: int = 0
    n_rejected: int = 0
    info: dict = field(default_factory=dict)

    @property
    def states(self) -> np.ndarray:
        return np.stack(self.y)


def _norm(err, y0, y1, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def integrate_rk45(
    rhs: Callable,
    u0,
    t_span: tuple[float, float],
    rel_tol: float = 1e-6,
    abs_tol: float = 1e-9,
    t_eval: Optional[Sequence[float]] = None,
    post_step: Optional[Callable] = None,
    first_step: Optional[float] = None,
    max_step: float = np.inf,
) -> Trajectory:
    """Adaptive Dormand-Prince integration of ``u' = rhs(t, u)``.

    Steps are shortened so that every time in ``t_eval`` is hit exactly;
    the solution there is the accepted step value, not an interpolant.
    ``post_step(t, u)`` may return a modified state after each accepted step
    (used for the spectral filter).
    """
    if rel_tol <= 0 or abs_tol <= 0:
        raise ValueError("tolerances must be positive")
    t0, t1 = map(float, t_span)
    if t1 <= t0:
        raise ValueError("t_span must be increasing")
    span = t1 - t0
    targets = np.array([t1] if t_eval is None else sorted(t_eval), dtype=float)
    if targets[0] < t0 or targets[-1] > t1 + 1e-12 * span:
        raise ValueError("t_eval outside t_span")
    y = np.array(u0, dtype=float)
    t = t0
    out_t, out_y = [], []
    ti = 0
    while ti < len(targets) and targets[ti] <= t0:
        out_t.append(t0)
        out_y.append(y.copy())
        ti += 1

    f = rhs(t, y)
    nfev = 1
    if first_step is None:
        scale = abs_tol + rel_tol * np.abs(y)
        d0 = np.sqrt(np.mean((y / scale) ** 2))
        d1 = np.sqrt(np.mean((f / scale) ** 2))
        if d1 == 0.0:
            h = span
        elif d0 < 1e-5 or d1 < 1e-5:
            h = 1e-6
        else:
            h = 0.01 * d0 / d1
        h = min(h, span)
    else:
        h = float(first_step)
    h = min(h, max_step)
    n_acc = n_rej = 0
    min_step = 1e-12 * span
    k = [None] * 7
    while ti < len(targets):
        target = targets[ti]
        hit = False
        h_want = h
        if t + h >= target - 1e-14 * span:
            h = target - t
            hit = True
        if h < min_step and not hit:
            raise StepUnderflowError(f"step size {h:.3e} below {min_step:.3e} at t={t:.6g}")
        k[0] = f
        for s in range(1, 7):
            ys = y + h * sum(a * k[j] for j, a in enumerate(_A[s]) if a != 0.0)
            k[s] = rhs(t + _C[s] * h, ys)
        nfev += 6
        y_new = ys  # the seventh stage point is the fifth-order solution (FSAL)
        err = h * sum(e * k[j] for j, e in enumerate(_E) if e != 0.0)
        en = _norm(err, y, y_new, rel_tol, abs_tol)
        if not np.isfinite(en):
            en = np.inf
        if en <= 1.0:
            t = target if hit else t + h
            n_acc += 1
            if post_step is not None:
                filtered = post_step(t, y_new)
                if filtered is not None:
                    y_new = filtered
                    f = rhs(t, y_new)
                    nfev += 1
                else:
                    f = k[6]
            else:
                f = k[6]
            y = y_new
            if hit:
                out_t.append(t)
                out_y.append(y.copy())
                ti += 1
            fac = 0.9 * en ** (-0.2) if en > 0 else 5.0
            h_next = h * min(5.0, max(0.2, fac))
            if hit:
                # A shortened landing step should not shrink the next one.
                h_next = max(h_next, h_want)
            h = min(h_next, max_step)
        else:
            n_rej += 1
            h = h * max(0.2, 0.9 * en ** (-0.2)) if np.isfinite(en) else 0.2 * h
            if h < min_step:
                raise StepUnderflowError(f"step size {h:.3e} below {min_step:.3e} at t={t:.6g}")
    return Trajectory(np.array(out_t), out_y, nfev, n_acc, n_rej)


def integrate_rk4(
    rhs: Callable,
    state0,
    dt: float,
    n_steps: int,
    filter: Optional[Callable] = None,
    snapshot_every: Optional[int] = None,
    t0: float = 0.0,
    callback: Optional[Callable] = None,
) -> Trajectory:
    """Classical RK4 with optional post-step ``filter(u)``.

    Snapshots are stored at step 0, every ``snapshot_every`` steps and at the
    final step. ``callback(step, t, u)`` is called after every step.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    u = np.array(state0, dtype=float)
    ts, ys = [t0], [u.copy()]
    nfev = 0
    for step in range(1, n_steps + 1):
        t = t0 + (step - 1) * dt
        k1 = rhs(t, u)
        k2 = rhs(t + 0.5 * dt, u + 0.5 * dt * k1)
        k3 = rhs(t + 0.5 * dt, u + 0.5 * dt * k2)
        k4 = rhs(t + dt, u + dt * k3)
        nfev += 4
        u = u + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if filter is not None:
            u = filter(u)
        if not np.all(np.isfinite(u)):
            raise NaNDetectedError(step)
        t_now = t0 + step * dt
        if callback is not None:
            callback(step, t_now, u)
        if (snapshot_every and step % snapshot_every == 0) or step == n_steps:
            if ts[-1] != t_now:
                ts.append(t_now)
                ys.append(u.copy())
    return Trajectory(np.array(ts), ys, nfev, n_steps, 0)
