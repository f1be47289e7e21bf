"""Hot loops with a numba implementation and a numpy fallback.

``basis_local_derivatives`` evaluates the ``p + 1`` non-vanishing B-spline
basis functions (and derivatives) at many points. ``swe_fd_rhs`` is the
second-order centered finite-difference shallow-water right-hand side.
The public names dispatch on :data:`bspf._accel.BACKEND`; the ``*_numba`` and
``*_numpy`` variants stay importable for cross-checks and benchmarks.
"""

import numpy as np

from ._accel import njit, select


def find_spans(knots, p, n, x):
    """Knot span index for each x, clamped to ``[p, n-1]`` so x=b uses the last span."""
    s = np.searchsorted(knots, x, side="right") - 1
    return np.clip(s, p, n - 1)


# Basis functions and derivatives (de Boor recursion with derivative triangle)


@njit
def _ders_one(knots, p, span, x, nd, out):
    ndu = np.zeros((p + 1, p + 1))
    left = np.zeros(p + 1)
    right = np.zeros(p + 1)
    a = np.zeros((2, p + 1))
    ndu[0, 0] = 1.0
    for j in range(1, p + 1):
        left[j] = x - knots[span + 1 - j]
        right[j] = knots[span + j] - x
        saved = 0.0
        for r in range(j):
            ndu[j, r] = right[r + 1] + left[j - r]
            temp = ndu[r, j - 1] / ndu[j, r]
            ndu[r, j] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        ndu[j, j] = saved
    for j in range(p + 1):
        out[0, j] = ndu[j, p]
    for r in range(p + 1):
        s1 = 0
        s2 = 1
        a[:, :] = 0.0
        a[0, 0] = 1.0
        for k in range(1, nd + 1):
            d = 0.0
            rk = r - k
            pk = p - k
            if r >= k:
                a[s2, 0] = a[s1, 0] / ndu[pk + 1, rk]
                d = a[s2, 0] * ndu[rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = k - 1 if r - 1 <= pk else p - r
            for j in range(j1, j2 + 1):
                a[s2, j] = (a[s1, j] - a[s1, j - 1]) / ndu[pk + 1, rk + j]
                d += a[s2, j] * ndu[rk + j, pk]
            if r <= pk:
                a[s2, k] = -a[s1, k - 1] / ndu[pk + 1, r]
                d += a[s2, k] * ndu[r, pk]
            out[k, r] = d
            s1, s2 = s2, s1
    fac = float(p)
    for k in range(1, nd + 1):
        for j in range(p + 1):
            out[k, j] *= fac
        fac *= p - k


@njit
def _basis_local_numba(knots, p, spans, x, nd):
    m = x.shape[0]
    out = np.zeros((m, nd + 1, p + 1))
    for i in range(m):
        _ders_one(knots, p, spans[i], x[i], nd, out[i])
    return out


def _pin_ends(knots, x, out):
    # Clamped ends interpolate exactly; the recursion can be off by one ulp there.
    for where, j in ((x == knots[0], 0), (x == knots[-1], -1)):
        if np.any(where):
            out[where, 0, :] = 0.0
            out[where, 0, j] = 1.0
    return out


def basis_local_derivatives_numba(knots, p, n, x, nd):
    x = np.ascontiguousarray(x, dtype=np.float64)
    spans = find_spans(knots, p, n, x).astype(np.int64)
    return spans, _pin_ends(knots, x, _basis_local_numba(np.ascontiguousarray(knots, dtype=np.float64), p, spans, x, nd))


def basis_local_derivatives_numpy(knots, p, n, x, nd):
    x = np.asarray(x, dtype=float)
    m = x.size
    spans = find_spans(knots, p, n, x)
    ndu = np.zeros((p + 1, p + 1, m))
    ndu[0, 0] = 1.0
    left = np.zeros((p + 1, m))
    right = np.zeros((p + 1, m))
    for j in range(1, p + 1):
        left[j] = x - knots[spans + 1 - j]
        right[j] = knots[spans + j] - x
        saved = np.zeros(m)
        for r in range(j):
            ndu[j, r] = right[r + 1] + left[j - r]
            temp = ndu[r, j - 1] / ndu[j, r]
            ndu[r, j] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        ndu[j, j] = saved
    out = np.zeros((nd + 1, p + 1, m))
    out[0] = ndu[:, p]
    for r in range(p + 1):
        s1, s2 = 0, 1
        a = np.zeros((2, p + 1, m))
        a[0, 0] = 1.0
        for k in range(1, nd + 1):
            d = np.zeros(m)
            rk, pk = r - k, p - k
            if r >= k:
                a[s2, 0] = a[s1, 0] / ndu[pk + 1, rk]
                d = a[s2, 0] * ndu[rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = k - 1 if r - 1 <= pk else p - r
            for j in range(j1, j2 + 1):
                a[s2, j] = (a[s1, j] - a[s1, j - 1]) / ndu[pk + 1, rk + j]
                d = d + a[s2, j] * ndu[rk + j, pk]
            if r <= pk:
                a[s2, k] = -a[s1, k - 1] / ndu[pk + 1, r]
                d = d + a[s2, k] * ndu[r, pk]
            out[k, r] = d
            s1, s2 = s2, s1
    fac = float(p)
    for k in range(1, nd + 1):
        out[k] *= fac
        fac *= p - k
    return spans, _pin_ends(knots, x, np.ascontiguousarray(np.moveaxis(out, 2, 0)))


basis_local_derivatives = select(basis_local_derivatives_numba, basis_local_derivatives_numpy)
basis_local_derivatives.__doc__ = """Return ``(spans, ders)`` with ``ders[i, k, j] = B^{(k)}_{spans[i]-p+j, p}(x[i])``."""


# Second-order centered FD right-hand side for the shallow water equations.
# State layout: q[0] = eta, q[1] = M, q[2] = N; arrays indexed [y, x].
# Walls: eta, tangential flux even-reflected, normal flux odd-reflected.


@njit
def _ddx(f, j, i, nx, dx, odd):
    if i == 0:
        return (f[j, 1] - (-f[j, 1] if odd else f[j, 1])) / (2.0 * dx)
    if i == nx - 1:
        return ((-f[j, nx - 2] if odd else f[j, nx - 2]) - f[j, nx - 2]) / (2.0 * dx)
    return (f[j, i + 1] - f[j, i - 1]) / (2.0 * dx)


@njit
def _ddy(f, j, i, ny, dy, odd):
    if j == 0:
        return (f[1, i] - (-f[1, i] if odd else f[1, i])) / (2.0 * dy)
    if j == ny - 1:
        return ((-f[ny - 2, i] if odd else f[ny - 2, i]) - f[ny - 2, i]) / (2.0 * dy)
    return (f[j + 1, i] - f[j - 1, i]) / (2.0 * dy)


@njit
def _swe_fd_rhs_numba(q, h, dx, dy, g, alpha):
    eta = q[0]
    mm = q[1]
    nn = q[2]
    ny, nx = eta.shape
    H = h + eta
    mm2 = mm * mm / H
    mn = mm * nn / H
    nn2 = nn * nn / H
    out = np.empty_like(q)
    for j in range(ny):
        for i in range(nx):
            hh = H[j, i]
            out[0, j, i] = -(_ddx(mm, j, i, nx, dx, True) + _ddy(nn, j, i, ny, dy, True))
            fr = g * alpha * alpha / hh ** (7.0 / 3.0) * np.sqrt(mm[j, i] ** 2 + nn[j, i] ** 2)
            out[1, j, i] = -(
                _ddx(mm2, j, i, nx, dx, False)
                + _ddy(mn, j, i, ny, dy, True)
                + g * hh * _ddx(eta, j, i, nx, dx, False)
                + fr * mm[j, i]
            )
            out[2, j, i] = -(
                _ddx(mn, j, i, nx, dx, True)
                + _ddy(nn2, j, i, ny, dy, False)
                + g * hh * _ddy(eta, j, i, ny, dy, False)
                + fr * nn[j, i]
            )
    out[1, :, 0] = 0.0
    out[1, :, nx - 1] = 0.0
    out[2, 0, :] = 0.0
    out[2, ny - 1, :] = 0.0
    return out


def _centered(f, axis, spacing, odd):
    sign = -1.0 if odd else 1.0
    f = np.moveaxis(f, axis, -1)
    pad = np.concatenate([sign * f[..., 1:2], f, sign * f[..., -2:-1]], axis=-1)
    d = (pad[..., 2:] - pad[..., :-2]) / (2.0 * spacing)
    return np.moveaxis(d, -1, axis)


def swe_fd_rhs_numpy(q, h, dx, dy, g, alpha):
    eta, mm, nn = q
    H = h + eta
    ddx = lambda f, odd: _centered(f, 1, dx, odd)
    ddy = lambda f, odd: _centered(f, 0, dy, odd)
    fr = g * alpha**2 / H ** (7.0 / 3.0) * np.sqrt(mm**2 + nn**2)
    out = np.empty_like(q)
    out[0] = -(ddx(mm, True) + ddy(nn, True))
    out[1] = -(ddx(mm * mm / H, False) + ddy(mm * nn / H, True) + g * H * ddx(eta, False) + fr * mm)
    out[2] = -(ddx(mm * nn / H, True) + ddy(nn * nn / H, False) + g * H * ddy(eta, False) + fr * nn)
    out[1, :, 0] = out[1, :, -1] = 0.0
    out[2, 0, :] = out[2, -1, :] = 0.0
    return out


def swe_fd_rhs_numba(q, h, dx, dy, g, alpha):
    return _swe_fd_rhs_numba(np.ascontiguousarray(q, dtype=np.float64), np.ascontiguousarray(h, dtype=np.float64), float(dx), float(dy), float(g), float(alpha))


swe_fd_rhs = select(swe_fd_rhs_numba, swe_fd_rhs_numpy)


# Spline sums: out[x, k] = sum_j w[j, x] * c[idx[j, x], k], j ascending.
# Both versions fix the order of the j-sum, so one column of a batch gives
# the same bits as that column alone.


@njit
def spline_sum_numba(idx, w, c):
    nj, nx = idx.shape
    nk = c.shape[1]
    out = np.empty((nx, nk))
    # j outermost keeps the w and idx rows contiguous.
    for x in range(nx):
        r = idx[0, x]
        for k in range(nk):
            out[x, k] = w[0, x] * c[r, k]
    for j in range(1, nj):
        for x in range(nx):
            r = idx[j, x]
            wx = w[j, x]
            for k in range(nk):
                out[x, k] += wx * c[r, k]
    return out


def spline_sum_numpy(idx, w, c):
    if c.shape[1] == 1:
        c1 = c[:, 0]
        out = w[0] * c1[idx[0]]
        for j in range(1, idx.shape[0]):
            out += w[j] * c1[idx[j]]
        return out[:, None]
    out = w[0][:, None] * c[idx[0]]
    for j in range(1, idx.shape[0]):
        out += w[j][:, None] * c[idx[j]]
    return out


spline_sum = select(spline_sum_numba, spline_sum_numpy)
