import numpy as np
import pytest
from scipy.interpolate import BSpline
from scipy.linalg import null_space

from bspf.errors import InsufficientBasisError
from bspf.grid import make_grid, sample
from bspf.periodizer import (
    assemble_kkt,
    build_plan,
    evaluate_spline,
    solve_coefficients,
    spline_antiderivative,
    trapezoid_weights,
)

G = make_grid(0.0, 2 * np.pi, 400)


def smooth(x):
    return np.exp(np.sin(x)) * np.cos(3 * x) + 0.1 * x**2


def ends_of(plan, P):
    """Endpoint derivatives of the spline with coefficients ``P`` (scipy oracle)."""
    kv = plan.basis.knots
    spl = BSpline(kv.knots, P, kv.degree)
    p = kv.degree
    left = [spl(kv.a, nu=k) for k in range(p)]
    right = [spl(np.nextafter(kv.b, kv.a), nu=k) for k in range(p)]
    return np.array(left + right)


def test_trapezoid_weights():
    w = trapezoid_weights(make_grid(0.0, 1.0, 5))
    np.testing.assert_array_equal(w, [0.125, 0.25, 0.25, 0.25, 0.125])


@pytest.mark.parametrize("p,n,m,beta", [(4, 8, 4, None), (5, 16, 8, None), (8, 32, 8, None), (11, 44, 16, 3.0)])
def test_constraints_hold(p, n, m, beta):
    plan = build_plan(G, p, n, m, beta)
    f = smooth(G.points)
    d = plan.boundary_data(f)
    P = plan.coefficients(f, d)
    got = ends_of(plan, P)
    # High derivatives are small differences of large terms; judge them on that scale.
    scale = np.abs(plan.constraint.c) @ np.abs(P)
    assert np.max(np.abs(got - d) / scale) < 1e-10


def test_determined_mode_matches_kkt():
    plan = build_plan(G, 5, 10, 6)
    assert plan.mode == "determined"
    f = smooth(G.points)
    d = plan.boundary_data(f)
    P1 = plan.coefficients(f, d)
    P2, mu = plan.coefficients_kkt(f, d)
    assert mu is None
    np.testing.assert_allclose(P1, P2, rtol=1e-9, atol=1e-9 * np.max(np.abs(P1)))


@pytest.mark.parametrize("p,n", [(3, 12), (5, 20), (6, 24)])
def test_elimination_matches_kkt(p, n):
    plan = build_plan(G, p, n, p + 2)
    assert plan.mode == "regularized"
    f = smooth(G.points)
    c1 = solve_coefficients(plan, f)
    c2 = solve_coefficients(plan, f, method="kkt")
    np.testing.assert_allclose(c1.p_vec, c2.p_vec, rtol=1e-7, atol=1e-7 * np.max(np.abs(c1.p_vec)))
    assert c2.multipliers.shape == (2 * p,)


def test_least_squares_optimality():
    # Moving P along the null space of C keeps the constraints and must not lower the misfit.
    plan = build_plan(G, 4, 16, 6)
    f = smooth(G.points)
    P = plan.coefficients(f, plan.boundary_data(f))
    w = plan.quad_weights
    Z = null_space(plan.constraint.c)
    assert Z.shape[1] == 16 - 8

    def misfit(Q):
        return float(np.sum(w * (plan.basis.design.T @ Q - f) ** 2))

    base = misfit(P)
    rng = np.random.default_rng(7)
    for _ in range(10):
        v = Z @ rng.normal(size=Z.shape[1])
        assert misfit(P + 1e-4 * v / np.linalg.norm(v)) > base


def test_boundary_matching_random_functions():
    # The periodic residual has matching end derivatives, measured by the same stencil.
    # With m > p and the stencil inside the end knot span the stencil is exact on
    # f_s; finer grids or m = p measure stencil rounding or truncation instead.
    p, m = 6, 8
    grid = make_grid(0.0, 2 * np.pi, 101)
    plan = build_plan(grid, p, 16, m)
    assert (m - 1) * grid.spacing < plan.basis.knots.interior[0]
    rng = np.random.default_rng(11)
    x = grid.points
    for _ in range(20):
        a, b, c = rng.uniform(0.5, 2.0, 3)
        f = np.exp(np.sin(a * x + c)) + np.cos(b * x) * x / 7.0
        d = plan.boundary_data(f)
        r = f - plan.basis.evaluate(plan.coefficients(f, d), 0)
        dr = plan.boundary_data(r)
        scale = np.maximum(np.maximum(np.abs(d[:p]), np.abs(d[p:])), 1.0)
        assert np.all(np.abs(dr[:p] - dr[p:]) <= 1e-6 * scale)


def test_plan_reuse_is_pure():
    plan = build_plan(G, 11, 44, 16, 3.0)
    f = smooth(G.points)
    P1 = solve_coefficients(plan, f).p_vec
    P2 = solve_coefficients(plan, f).p_vec
    np.testing.assert_array_equal(P1, P2)


def test_zero_input_gives_zero_coefficients():
    plan = build_plan(G, 8, 32, 8)
    np.testing.assert_array_equal(solve_coefficients(plan, np.zeros(400)).p_vec, 0.0)


def test_antiderivative_of_one_is_ramp():
    plan = build_plan(G, 8, 32, 8)
    coeffs = solve_coefficients(plan, np.ones(400))
    np.testing.assert_allclose(spline_antiderivative(plan, coeffs).values, G.points, atol=1e-10)


def test_polynomial_in_span_is_reproduced():
    # A cubic lies in the spline space and the m = 6 stencil is exact for it.
    plan = build_plan(G, 3, 12, 6)
    f = sample(G, lambda x: 1 - 2 * x + 0.3 * x**2 - 0.05 * x**3)
    coeffs = solve_coefficients(plan, f)
    np.testing.assert_allclose(evaluate_spline(plan, coeffs).values, f.values, atol=1e-11)


def test_residual_vanishes_at_ends():
    plan = build_plan(G, 8, 32, 8)
    f = smooth(G.points)
    fs = evaluate_spline(plan, solve_coefficients(plan, f)).values
    r = f - fs
    assert abs(r[0]) < 1e-12 and abs(r[-1]) < 1e-12


def test_overrides_enter_constraints():
    plan = build_plan(G, 5, 16, 8)
    f = smooth(G.points)
    coeffs = solve_coefficients(plan, f, overrides=[(0, 2.5), (6, -1.0)])
    got = ends_of(plan, coeffs.p_vec)
    assert got[0] == pytest.approx(2.5, abs=1e-10)
    assert got[6] == pytest.approx(-1.0, abs=1e-7)


def test_parity_boundary_data():
    plan = build_plan(G, 6, 24, 6)
    x = G.points
    f = np.cos(x) + 0.5 * np.cos(2 * x)  # even about both ends
    d = plan.boundary_data(f, parity=("even", "even"))
    assert np.all(d[1::2] == 0.0)
    assert d[0] == pytest.approx(1.5, abs=1e-12)
    # f'' = -3 at x = 0; mirror truncation is O(h^4).
    assert d[2] == pytest.approx(-3.0, abs=1e-6)


def test_batched_columns_match_single_exactly():
    plan = build_plan(G, 8, 32, 8)
    F = np.column_stack([smooth(G.points), np.sin(G.points), G.points**3])
    P = plan.coefficients(F, plan.boundary_data(F))
    for j in range(3):
        Pj = plan.coefficients(F[:, j], plan.boundary_data(F[:, j]))
        np.testing.assert_array_equal(P[:, j], Pj)


def test_spline_antiderivative_matches_scipy():
    plan = build_plan(G, 5, 16, 8)
    coeffs = solve_coefficients(plan, smooth(G.points))
    kv = plan.basis.knots
    anti = BSpline(kv.knots, coeffs.p_vec, kv.degree).antiderivative()
    ref = anti(G.points[:-1]) - anti(0.0)
    np.testing.assert_allclose(spline_antiderivative(plan, coeffs).values[:-1], ref, atol=1e-12)


def test_kkt_assembly_shape_and_symmetry():
    plan = build_plan(make_grid(0.0, 1.0, 50), 3, 10, 4, lam=1e-3)
    K = assemble_kkt(plan)
    assert K.shape == (16, 16)
    Q = K[:10, :10]
    np.testing.assert_allclose(Q, Q.T, atol=1e-14)
    np.testing.assert_allclose(K[10:, :10], -K[:10, 10:].T)


def test_plan_validation():
    with pytest.raises(InsufficientBasisError):
        build_plan(G, 8, 15, 8)
    with pytest.raises(ValueError):
        build_plan(G, 8, 32, 6)
    with pytest.raises(ValueError):
        build_plan(make_grid(0.0, 1.0, 10), 4, 8, 12)
    with pytest.raises(ValueError):
        build_plan(G, 4, 10, 4, lam=-1.0)
    plan = build_plan(G, 4, 10, 4)
    with pytest.raises(ValueError):
        solve_coefficients(plan, np.zeros(10))
    with pytest.raises(ValueError):
        solve_coefficients(plan, np.zeros(400), method="lu")
    with pytest.raises(ValueError):
        evaluate_spline(plan, solve_coefficients(plan, np.zeros(400)), 2)
