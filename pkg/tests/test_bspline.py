import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.interpolate import BSpline

from bspf import kernels
from bspf.bspline import (
    basis_antiderivative,
    basis_antiderivative_many,
    build_design_matrices,
    build_knots,
    eval_basis,
    eval_basis_many,
)
from bspf.errors import InsufficientBasisError, OutOfDomainError
from bspf.grid import make_grid

UNIT = make_grid(0.0, 1.0, 3)
TWO_PI = make_grid(0.0, 2 * np.pi, 2000)


def scipy_basis(kv, x, nu=0):
    """Independent reference: each basis function as a scipy BSpline."""
    out = np.empty((kv.n_basis, np.size(x)))
    for i in range(kv.n_basis):
        c = np.zeros(kv.n_basis)
        c[i] = 1.0
        out[i] = BSpline(kv.knots, c, kv.degree, extrapolate=False)(x, nu)
    # scipy leaves x = b undefined on the half-open last span; take the left limit.
    at_b = np.asarray(x) == kv.b
    if np.any(at_b):
        xb = np.nextafter(kv.b, kv.a)
        for i in range(kv.n_basis):
            c = np.zeros(kv.n_basis)
            c[i] = 1.0
            out[i, at_b] = BSpline(kv.knots, c, kv.degree)(xb, nu)
    return out


def test_linear_knots():
    kv = build_knots(UNIT, 1, 3)
    np.testing.assert_array_equal(kv.knots, [0, 0, 0.5, 1, 1])


def test_benchmark_knots():
    kv = build_knots(TWO_PI, 11, 44, 3.0)
    assert kv.knots.size == 56
    np.testing.assert_array_equal(kv.knots[:12], 0.0)
    np.testing.assert_array_equal(kv.knots[-12:], 2 * np.pi)
    inner = kv.interior
    assert inner.size == 44 - 11 - 1
    np.testing.assert_allclose(inner + inner[::-1], 2 * np.pi, atol=1e-13)
    gaps = np.diff(kv.knots[11:-11])
    # Edge-clustered: end gaps much smaller than central ones.
    assert gaps[0] < 0.2 * gaps[len(gaps) // 2]
    assert gaps[-1] < 0.2 * gaps[len(gaps) // 2]


def test_small_beta_limit_is_uniform():
    uni = build_knots(TWO_PI, 11, 44)
    tiny = build_knots(TWO_PI, 11, 44, 1e-5)
    np.testing.assert_allclose(tiny.interior, uni.interior, atol=1e-8)


def test_insufficient_basis():
    with pytest.raises(InsufficientBasisError):
        build_knots(TWO_PI, 11, 21)


def test_degree_zero_like_indicator():
    # Degree-1 spline hat functions at interior knots: the p=0 limit is not
    # constructible (clamped n >= 2p), so check the hat arithmetic instead.
    kv = build_knots(UNIT, 1, 3)
    np.testing.assert_allclose(eval_basis(kv, 0.25, 0)[:, 0], [0.5, 0.5, 0.0], atol=1e-15)


def test_design_matrix_linear():
    kv = build_knots(UNIT, 1, 3)
    basis = build_design_matrices(kv, UNIT)
    np.testing.assert_array_equal(basis.design, np.eye(3))


@pytest.mark.parametrize("p,n,beta", [(1, 3, None), (3, 10, None), (8, 32, None), (11, 44, 3.0)])
def test_matches_scipy(p, n, beta):
    grid = make_grid(0.0, 2 * np.pi, 257)
    kv = build_knots(grid, p, n, beta)
    x = grid.points
    ours = eval_basis_many(kv, x, 1)
    # The x = b reference is a one-ulp-left limit, hence the looser floor.
    np.testing.assert_allclose(ours[:, 0, :], scipy_basis(kv, x, 0), atol=1e-11)
    if p >= 1:
        ref = scipy_basis(kv, x, 1)
        np.testing.assert_allclose(ours[:, 1, :], ref, atol=1e-10 * np.max(np.abs(ref)))


def test_higher_derivatives_match_scipy():
    grid = make_grid(0.0, 1.0, 51)
    kv = build_knots(grid, 6, 20, 2.0)
    ours = eval_basis_many(kv, grid.points, 5)
    for k in range(6):
        ref = scipy_basis(kv, grid.points, k)
        np.testing.assert_allclose(ours[:, k, :], ref, atol=1e-9 * max(1.0, np.max(np.abs(ref))))


def test_design_properties_benchmark():
    kv = build_knots(TWO_PI, 11, 44, 3.0)
    basis = build_design_matrices(kv, TWO_PI)
    np.testing.assert_allclose(basis.design.sum(axis=0), 1.0, atol=1e-12)
    d1 = basis.design_d1
    assert np.max(np.abs(d1.sum(axis=0))) <= 1e-10 * np.max(np.abs(d1))
    assert np.max(np.count_nonzero(basis.design, axis=0)) <= 12


@settings(max_examples=20, deadline=None)
@given(p=st.integers(1, 11), extra=st.integers(0, 30), beta=st.one_of(st.none(), st.floats(0.5, 4.0)), seed=st.integers(0, 2**31))
def test_partition_of_unity_random_points(p, extra, beta, seed):
    grid = make_grid(-1.0, 2.0, 10)
    kv = build_knots(grid, p, 2 * p + extra, beta)
    x = np.random.default_rng(seed).uniform(-1.0, 2.0, 1000)
    vals = eval_basis_many(kv, x, 0)[:, 0, :]
    assert np.max(np.abs(vals.sum(axis=0) - 1.0)) < 1e-12
    assert np.all(vals >= -1e-15)


def test_clamped_endpoint_interpolation():
    kv = build_knots(TWO_PI, 11, 44, 3.0)
    assert eval_basis(kv, 0.0)[0, 0] == 1.0
    assert eval_basis(kv, 2 * np.pi)[-1, 0] == 1.0


def test_derivative_consistency_fd():
    kv = build_knots(TWO_PI, 5, 16)
    rng = np.random.default_rng(3)
    x = rng.uniform(0.2, 6.0, 50)
    # Stay away from knots.
    x = x[np.min(np.abs(x[:, None] - kv.knots[None, :]), axis=1) > 1e-3]
    h = 1e-6
    fd = (eval_basis_many(kv, x + h)[:, 0] - eval_basis_many(kv, x - h)[:, 0]) / (2 * h)
    d1 = eval_basis_many(kv, x, 1)[:, 1]
    np.testing.assert_allclose(d1, fd, atol=1e-5 * max(1.0, np.max(np.abs(d1))))


def test_out_of_domain():
    kv = build_knots(UNIT, 1, 3)
    with pytest.raises(OutOfDomainError):
        eval_basis(kv, 1.5)
    with pytest.raises(OutOfDomainError):
        basis_antiderivative(kv, -0.1)


def test_antiderivative_linear_areas():
    kv = build_knots(UNIT, 1, 3)
    np.testing.assert_array_equal(basis_antiderivative(kv, 0.0), 0.0)
    np.testing.assert_allclose(basis_antiderivative(kv, 1.0), [0.25, 0.5, 0.25], atol=1e-15)


@pytest.mark.parametrize("p,n,beta", [(3, 9, None), (8, 32, None), (11, 44, 3.0)])
def test_antiderivative_against_quadrature(p, n, beta):
    kv = build_knots(TWO_PI, p, n, beta)
    z = kv.knots
    total = basis_antiderivative(kv, 2 * np.pi)
    np.testing.assert_allclose(total, (z[p + 1 : p + 1 + n] - z[:n]) / (p + 1), atol=1e-14)
    for i in (0, n // 2, n - 1):
        c = np.zeros(n)
        c[i] = 1.0
        spl = BSpline(z, c, p)
        for x in (1.0, np.pi, 5.5):
            ref, _ = quad(spl, 0.0, x, points=z[(z > 0) & (z < x)], limit=200, epsabs=1e-14, epsrel=1e-13)
            assert basis_antiderivative(kv, x)[i] == pytest.approx(ref, abs=1e-12)


def test_antiderivative_fd_consistency():
    kv = build_knots(TWO_PI, 6, 20)
    x = np.linspace(0.1, 6.1, 37)
    h = 1e-5
    fd = (basis_antiderivative_many(kv, x + h) - basis_antiderivative_many(kv, x - h)) / (2 * h)
    np.testing.assert_allclose(fd, eval_basis_many(kv, x)[:, 0], atol=1e-5)


def test_basis_evaluate_matches_dense():
    kv = build_knots(TWO_PI, 11, 44, 3.0)
    basis = build_design_matrices(kv, TWO_PI)
    P = np.random.default_rng(0).normal(size=(44, 3))
    np.testing.assert_allclose(basis.evaluate(P, 0), basis.design.T @ P, atol=1e-12)
    np.testing.assert_allclose(basis.evaluate(P[:, 0], 1), basis.design_d1.T @ P[:, 0], atol=1e-9)
    np.testing.assert_allclose(basis.integrate(P), basis_antiderivative_many(kv, TWO_PI.points).T @ P, atol=1e-12)


def test_numba_and_numpy_kernels_agree():
    kv = build_knots(TWO_PI, 11, 44, 3.0)
    x = np.linspace(0, 2 * np.pi, 301)
    s1, d1 = kernels.basis_local_derivatives_numba(kv.knots, 11, 44, x, 3)
    s2, d2 = kernels.basis_local_derivatives_numpy(kv.knots, 11, 44, x, 3)
    np.testing.assert_array_equal(s1, s2)
    np.testing.assert_allclose(d1, d2, rtol=1e-12, atol=1e-12 * np.max(np.abs(d1)))
