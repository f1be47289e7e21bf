"""Fourier treatment of periodic residuals on an endpoint-inclusive grid.

The grid holds ``N`` points including both ends, so one period is the first
``N - 1`` samples. Every operation transforms those, and the output at
index ``N - 1`` is the periodic image of index 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.fft as sfft

from .grid import Field, Grid


@dataclass(frozen=True)
class SpectralWorkspace:
    n_fft: int
    period: float
    a: float = 0.0
    filter_alpha: float = 36.0
    filter_order: int = 36
    omega: np.ndarray = field(init=False, repr=False)
    filter_symbol: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n_fft < 2:
            raise ValueError("need at least two samples per period")
        k = np.arange(self.n_fft // 2 + 1)
        omega = 2.0 * np.pi * k / self.period
        kmax = self.n_fft // 2
        sym = np.exp(-self.filter_alpha * (k / kmax) ** self.filter_order)
        for arr in (omega, sym):
            arr.setflags(write=False)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "filter_symbol", sym)

    @property
    def has_nyquist(self) -> bool:
        return self.n_fft % 2 == 0

    def clone(self) -> "SpectralWorkspace":
        return replace(self)

    def nodes(self) -> np.ndarray:
        return self.a + self.period * np.arange(self.n_fft + 1) / self.n_fft


def make_workspace(grid: Grid, filter_alpha: float = 36.0, filter_order: int = 36) -> SpectralWorkspace:
    return SpectralWorkspace(grid.n_points - 1, grid.length, grid.a, filter_alpha, filter_order)


def _bcast(v, ndim):
    return v.reshape((-1,) + (1,) * (ndim - 1))


def _close_period(periodic: np.ndarray) -> np.ndarray:
    return np.concatenate([periodic, periodic[:1]], axis=0)


def spectral_derivative(ws: SpectralWorkspace, values: np.ndarray) -> np.ndarray:
    """Array form of :func:`fourier_derivative`; differentiates along axis 0."""
    coef = sfft.rfft(values[: ws.n_fft], axis=0)
    mult = 1j * ws.omega
    if ws.has_nyquist:
        mult = mult.copy()
        mult[-1] = 0.0
    out = sfft.irfft(coef * _bcast(mult, values.ndim), n=ws.n_fft, axis=0)
    return _close_period(out)


def spectral_antiderivative(ws: SpectralWorkspace, values: np.ndarray) -> np.ndarray:
    """Array form of :func:`fourier_antiderivative`; zero at ``x = a``."""
    coef = sfft.rfft(values[: ws.n_fft], axis=0)
    mean = coef[0].real / ws.n_fft
    inv = np.zeros_like(ws.omega, dtype=complex)
    inv[1:] = 1.0 / (1j * ws.omega[1:])
    if ws.has_nyquist:
        inv[-1] = 0.0
    periodic = sfft.irfft(coef * _bcast(inv, values.ndim), n=ws.n_fft, axis=0)
    periodic = _close_period(periodic - periodic[:1])
    ramp = _bcast(ws.nodes() - ws.a, values.ndim)
    return periodic + ramp * mean


def spectral_filter(ws: SpectralWorkspace, values: np.ndarray) -> np.ndarray:
    coef = sfft.rfft(values[: ws.n_fft], axis=0)
    out = sfft.irfft(coef * _bcast(ws.filter_symbol, values.ndim), n=ws.n_fft, axis=0)
    return _close_period(out)


def _wrap(r, out):
    return Field(r.grid, out) if isinstance(r, Field) else out


def _raw(r):
    return r.values if isinstance(r, Field) else np.asarray(r, dtype=float)


def fourier_derivative(ws: SpectralWorkspace, r):
    return _wrap(r, spectral_derivative(ws, _raw(r)))


def fourier_antiderivative(ws: SpectralWorkspace, r):
    return _wrap(r, spectral_antiderivative(ws, _raw(r)))


def exponential_filter(ws: SpectralWorkspace, u):
    """Multiply mode ``k`` by ``exp(-alpha (k / k_max)^s)`` (raw periodic data)."""
    return _wrap(u, spectral_filter(ws, _raw(u)))
