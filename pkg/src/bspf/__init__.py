"""B-spline periodized Fourier (BSPF) differentiation and integration on non-periodic domains."""

from ._accel import BACKEND
from .boundary import apply_bc_overrides, build_constraint_matrix, build_stencil, estimate_boundary_derivatives
from .bspline import basis_antiderivative, build_design_matrices, build_knots, eval_basis
from .grid import Field, Field2D, Grid, GridMap, make_grid, make_sigmoid_composite_map, sample
from .operators import BspfOperator, make_operator
from .periodizer import build_plan, evaluate_spline, solve_coefficients, spline_antiderivative
from .spectral import exponential_filter, fourier_antiderivative, fourier_derivative, make_workspace

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BspfOperator",
    "Field",
    "Field2D",
    "Grid",
    "GridMap",
    "apply_bc_overrides",
    "basis_antiderivative",
    "build_constraint_matrix",
    "build_design_matrices",
    "build_knots",
    "build_plan",
    "build_stencil",
    "estimate_boundary_derivatives",
    "eval_basis",
    "evaluate_spline",
    "exponential_filter",
    "fourier_antiderivative",
    "fourier_derivative",
    "make_grid",
    "make_operator",
    "make_sigmoid_composite_map",
    "make_workspace",
    "sample",
    "solve_coefficients",
    "spline_antiderivative",
]
