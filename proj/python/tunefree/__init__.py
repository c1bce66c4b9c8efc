"""Tuning-free regression, matrix denoising and the supporting convex solvers."""

from ._core import (
    BasisPursuitResult,
    CvLassoResult,
    InputError,
    MatrixFit,
    RegressionFit,
    SolverError,
    basis_pursuit,
    cv_lasso,
    design_norm,
    dual_norm,
    gen_design,
    gen_response,
    l1_constrained_ls,
    matrix_fit,
    matrix_fit_with_noise,
    normal_vector,
    norm,
    nuclear_constrained,
    project_ball,
    regression_fit,
    regression_fit_with_noise,
)

__all__ = [
    "BasisPursuitResult",
    "CvLassoResult",
    "InputError",
    "MatrixFit",
    "RegressionFit",
    "SolverError",
    "basis_pursuit",
    "cv_lasso",
    "design_norm",
    "dual_norm",
    "gen_design",
    "gen_response",
    "l1_constrained_ls",
    "matrix_fit",
    "matrix_fit_with_noise",
    "normal_vector",
    "norm",
    "nuclear_constrained",
    "project_ball",
    "regression_fit",
    "regression_fit_with_noise",
]
