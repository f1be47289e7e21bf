import numpy as np
import pytest

from bspf.errors import DimensionMismatchError
from bspf.experiments import NoiseSpec, fit_slope, make_test_function
from bspf.grid import Field, Field2D, identity_map, make_grid, make_sigmoid_composite_map, sample, sample_2d
from bspf.operators import (
    antiderivative,
    antiderivative_mapped,
    apply_along_axis,
    differentiate,
    differentiate_mapped,
    make_operator,
)

TWO_PI = make_grid(0.0, 2 * np.pi, 2000)
MAP_ARGS = ([0.0, np.pi, 2 * np.pi], [0.5, 1.2, 0.5], [0.6, 0.9, 0.6])


@pytest.fixture(scope="module")
def bench_op():
    return make_operator(TWO_PI, 11, 44, 16, 3.0)


@pytest.fixture(scope="module")
def mapped800():
    g = make_grid(0.0, 2 * np.pi, 800)
    return make_operator(g, 11, 44, 16, 3.0, map=make_sigmoid_composite_map(g, *MAP_ARGS))


def test_constant_differentiates_to_zero(bench_op):
    out = differentiate(bench_op, Field(TWO_PI, np.full(2000, 3.7)))
    assert isinstance(out, Field)
    assert np.max(np.abs(out.values)) < 1e-10


def test_linear_reproduced(bench_op):
    d = differentiate(bench_op, TWO_PI.points)
    assert np.max(np.abs(d - 1.0)) < 1e-8


def test_smooth_nonperiodic_function(bench_op):
    x = TWO_PI.points
    d = bench_op.differentiate(np.exp(np.sin(x)) * np.cos(3 * x) + x)
    exact = np.exp(np.sin(x)) * (np.cos(x) * np.cos(3 * x) - 3 * np.sin(3 * x)) + 1
    assert np.max(np.abs(d - exact)) < 1e-8


def test_noisy_test_function_benchmark_settings(bench_op):
    f, fp = make_test_function(NoiseSpec(seed=0))
    x = TWO_PI.points
    err = np.abs(bench_op.differentiate(f(x)) - fp(x))
    assert np.max(err[:-1]) <= 1e-8


def test_second_derivative(bench_op):
    x = TWO_PI.points
    err = np.abs(bench_op.second_derivative(np.sin(2 * x) + x**2) - (-4 * np.sin(2 * x) + 2))
    # The second pass differentiates the first pass's end error with a 16-point stencil.
    assert np.max(err[100:-100]) < 1e-7
    assert np.max(err) < 1e-3


def test_linearity(bench_op):
    rng = np.random.default_rng(9)
    x = TWO_PI.points
    f, g = np.exp(np.cos(x)), np.sin(5 * x) * x
    a, b = rng.normal(size=2)
    lhs = bench_op.differentiate(a * f + b * g)
    rhs = a * bench_op.differentiate(f) + b * bench_op.differentiate(g)
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * np.max(np.abs(rhs))


def test_antiderivative_basic(bench_op):
    x = TWO_PI.points
    np.testing.assert_allclose(antiderivative(bench_op, np.zeros(2000), ("a", 5.0)), 5.0, atol=1e-12)
    np.testing.assert_allclose(bench_op.antiderivative(np.cos(x)), np.sin(x), atol=1e-9)
    right = bench_op.antiderivative(np.cos(x), ("b", 1.0))
    assert right[-1] == pytest.approx(1.0, abs=1e-14)
    np.testing.assert_allclose(right, np.sin(x) + 1.0, atol=1e-9)
    with pytest.raises(ValueError):
        bench_op.antiderivative(np.cos(x), ("c", 0.0))


def test_antiderivative_test_function():
    f, fp = make_test_function()
    errs = []
    for N in (1500, 2000):
        g = make_grid(0.0, 2 * np.pi, N)
        op = make_operator(g)
        F = op.antiderivative(fp(g.points), ("a", f(np.zeros(1))[0]))
        errs.append(np.sqrt(np.mean((F - f(g.points)) ** 2)))
    assert errs[1] < 1e-10
    assert errs[0] / errs[1] > 1e4


def test_derivative_antiderivative_round_trip(bench_op):
    x = TWO_PI.points
    f = np.exp(np.sin(x)) + x**2 / 5
    back = bench_op.antiderivative(bench_op.differentiate(f), ("a", f[0]))
    np.testing.assert_allclose(back, f, atol=1e-9)


def test_identity_map_matches_unmapped():
    g = make_grid(0.0, 2 * np.pi, 500)
    op = make_operator(g)
    opm = make_operator(g, map=identity_map(g))
    x = g.points
    f = np.exp(np.sin(x))
    np.testing.assert_allclose(differentiate_mapped(opm, f), op.differentiate(f), rtol=0, atol=1e-12)
    np.testing.assert_allclose(antiderivative_mapped(opm, f), op.antiderivative(f), rtol=0, atol=1e-12)


def test_mapped_polynomial(mapped800):
    xi = mapped800.mapped_points()
    np.testing.assert_allclose(mapped800.differentiate_mapped(xi**2), 2 * xi, atol=1e-7)
    np.testing.assert_allclose(mapped800.antiderivative_mapped(np.ones_like(xi)), xi, atol=1e-8)


def test_mapped_round_trip(mapped800):
    xi = mapped800.mapped_points()
    f = np.sin(2 * xi) + xi
    back = mapped800.antiderivative_mapped(mapped800.differentiate_mapped(f), ("a", f[0]))
    np.testing.assert_allclose(back, f, atol=1e-7)


def test_mapped_test_function(mapped800):
    f, fp = make_test_function()
    xi = mapped800.mapped_points()
    err = np.abs(mapped800.differentiate_mapped(f(xi)) - fp(xi))
    assert np.max(err[:-1]) <= 1e-8


def test_map_grid_checks():
    g = make_grid(0.0, 1.0, 50)
    other = make_grid(0.0, 2.0, 50)
    with pytest.raises(ValueError):
        make_operator(g, 3, 8, 4, None, map=identity_map(other))


def test_apply_along_axis_examples():
    g = make_grid(0.0, 2 * np.pi, 300)
    gy = make_grid(0.0, 1.0, 7)
    op = make_operator(g, 8, 32, 8, None)
    u = sample_2d(g, gy, lambda x, y: np.sin(x) + 0 * y)
    out = apply_along_axis(op, u, "x")
    assert isinstance(out, Field2D)
    np.testing.assert_allclose(out.values, np.cos(g.points)[None, :].repeat(7, 0), atol=1e-9)

    unit = make_grid(0.0, 1.0, 41)
    op1 = make_operator(unit, 5, 12, 6, None)
    v = sample_2d(unit, unit, lambda x, y: x * y)
    X, _ = np.meshgrid(unit.points, unit.points)
    np.testing.assert_allclose(op1.apply_along_axis(v, "y").values, X, atol=1e-10)


@pytest.mark.parametrize("axis", ["x", "y"])
@pytest.mark.parametrize("kw", [{}, {"overrides": [(0, 0.0), (8, 0.0)]}, {"parity": ("odd", "even")}])
def test_apply_along_axis_bitwise(axis, kw):
    g = make_grid(0.0, 100.0, 201)
    op = make_operator(g, 8, 32, 8, None)
    rng = np.random.default_rng(4)
    u = Field2D(g, g, rng.normal(size=(201, 201)))
    out = op.apply_along_axis(u, axis, **kw).values
    for j in range(0, 201, 10):
        if axis == "x":
            np.testing.assert_array_equal(out[j], op.derivative_values(u.values[j], **kw))
        else:
            np.testing.assert_array_equal(out[:, j], op.derivative_values(u.values[:, j], **kw))
    filt = op.apply_along_axis(u, axis, "filter", **kw).values
    line = u.values[5] if axis == "x" else u.values[:, 5]
    got = filt[5] if axis == "x" else filt[:, 5]
    np.testing.assert_array_equal(got, op.filter_values(line, **kw))


def test_apply_along_axis_errors():
    g = make_grid(0.0, 1.0, 30)
    op = make_operator(g, 3, 8, 4, None)
    u = Field2D(make_grid(0.0, 1.0, 20), make_grid(0.0, 1.0, 30), np.zeros((30, 20)))
    with pytest.raises(DimensionMismatchError):
        op.apply_along_axis(u, "x")
    with pytest.raises(ValueError):
        op.apply_along_axis(u, "z")
    with pytest.raises(ValueError):
        op.apply_along_axis(Field2D(g, g, np.zeros((30, 30))), "x", "integrate")
    with pytest.raises(DimensionMismatchError):
        op.differentiate(np.zeros(29))


def test_field_on_wrong_grid_rejected():
    g = make_grid(0.0, 1.0, 30)
    op = make_operator(g, 3, 8, 4, None)
    with pytest.raises(ValueError):
        op.differentiate(sample(make_grid(0.0, 2.0, 30), np.sin))


def test_stored_and_per_call_overrides():
    g = make_grid(0.0, 1.0, 200)
    x = g.points
    op = make_operator(g, 5, 16, 6, None, bc_overrides=[(0, 0.0)])
    assert op.periodize(np.cos(x))[0][0] == pytest.approx(0.0, abs=1e-14)
    # Per-call overrides come after the stored ones and win.
    assert op.periodize(np.cos(x), [(0, 2.0)])[0][0] == pytest.approx(2.0, abs=1e-14)


def _tail_errors(op_kind, sizes):
    # Non-periodic analytic data on [0, 3] with p = m = 4.
    errs = []
    for N in sizes:
        g = make_grid(0.0, 3.0, N)
        op = make_operator(g, 4, 16, 4, None)
        x = g.points
        f = np.exp(np.sin(x)) * np.cos(3 * x)
        fp = np.exp(np.sin(x)) * (np.cos(x) * np.cos(3 * x) - 3 * np.sin(3 * x))
        if op_kind == "diff":
            errs.append(np.max(np.abs(op.differentiate(f) - fp)))
        else:
            errs.append(np.sqrt(np.mean((op.antiderivative(fp, ("a", f[0])) - f) ** 2)))
    return np.array(errs)


def test_derivative_algebraic_tail():
    sizes = [400, 800, 1600, 3200]
    slope = fit_slope(sizes, _tail_errors("diff", sizes))
    assert abs(slope - (-(4 - 1))) <= 1.0


def test_antiderivative_algebraic_tail():
    sizes = [400, 800, 1600, 3200]
    slope = fit_slope(sizes, _tail_errors("int", sizes))
    assert abs(slope - (-(4 + 1))) <= 1.0
