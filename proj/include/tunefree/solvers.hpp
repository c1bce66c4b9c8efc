#pragma once

#include "tunefree/types.hpp"

namespace tunefree::solvers {

struct SolverSettings {
    int max_iterations = 50000;
    double primal_tolerance = 1e-6;
    double dual_tolerance = 1e-6;
    double budget_root_tolerance = 1e-4;

    /// Throws InputError unless every tolerance is positive and
    /// max_iterations >= 1.
    void validate() const;
};

struct BasisPursuitResult {
    Vector beta;
    double objective = 0.0; // |beta|_1
    Vector dual_certificate;
    int iterations = 0;
};

/// Minimum-l1 solution of A beta = y.
///
/// Follows the exact piecewise-linear Lasso path
///   min (1/2)||y - A beta||^2 + lambda |beta|_1
/// from lambda = ||A^T y||_inf down to lambda = 0; for full row rank A the
/// end point is a basis pursuit solution. The dual certificate is
/// v = A_S (A_S^T A_S)^{-1} sign(beta_S) from the final segment, which
/// satisfies ||A^T v||_inf <= 1 and v.y = |beta|_1.
///
/// Throws SolverError when A is all-zero, when y is not reachable (A is rank
/// deficient), or when the path needs more than max_iterations breakpoints.
BasisPursuitResult basis_pursuit(const Matrix &A, const Vector &y,
                                 const SolverSettings &settings = {});

/// argmin{ |beta|_1 : ||y - X beta||^2 <= budget }.
///
/// Walks the same Lasso path and stops at the penalty where the squared
/// residual equals the budget. Along a path segment the squared residual is
/// an exact quadratic in the penalty, so the crossing is found in closed form.
/// y must lie in the column space of X; otherwise the residual floor may
/// exceed the budget and SolverError is thrown.
Vector l1_constrained_ls(const Matrix &X, const Vector &y, double budget,
                         const SolverSettings &settings = {});

struct Svd {
    Matrix U;
    Vector s; // nonincreasing
    Matrix V;
};

/// Thin SVD, M = U diag(s) V^T.
Svd svd(const Matrix &M);

struct NuclearResult {
    Matrix m_hat;
    double theta = 0.0;
};

/// argmin{ ||A||_* : ||Y - A||_HS^2 <= budget } via singular value
/// soft-thresholding at the level theta with sum_i min(s_i, theta)^2 = budget.
NuclearResult nuclear_constrained(const Matrix &Y, double budget);

/// Smallest theta >= 0 with sum_i min(s_i, theta)^2 >= budget, for s >= 0.
/// Returns max(s) if the budget exceeds sum_i s_i^2.
double capped_square_root(const Vector &s, double budget);

struct Projection {
    Vector y_prime;
    Index rank = 0;
};

/// Default relative rank threshold: 1e-10 * max(n, p).
double default_rank_tolerance(Index rows, Index cols);

/// Euclidean projection of y onto span(columns of X); rank counts singular
/// values above rank_tolerance * s_max. A negative rank_tolerance selects
/// default_rank_tolerance.
Projection column_space_projection(const Matrix &X, const Vector &y,
                                   double rank_tolerance = -1.0);

} // namespace tunefree::solvers
