#pragma once

#include "tunefree/types.hpp"

#include <vector>

namespace tunefree::solvers::detail {

/// Exact homotopy for min (1/2)||y - A beta||^2 + lambda |beta|_1, tracked
/// from lambda = ||A^T y||_inf downwards. The active Gram matrix is kept as
/// an upper-triangular factor R (A_S^T A_S = R^T R) updated by column
/// insertion and Givens deletion.
class LassoPath {
public:
    enum class Stop { Trivial, PenaltyZero, Budget };

    LassoPath(const Matrix &A, const Vector &y);

    /// Advances until lambda reaches zero or, when budget >= 0, until the
    /// squared residual falls to the budget. Throws SolverError after
    /// max_steps breakpoints.
    Stop run(double budget, int max_steps);

    Vector beta() const;
    /// A_S (A_S^T A_S)^{-1} sign_S of the last segment walked.
    Vector certificate() const;
    const Vector &residual() const { return r_; }
    double lambda() const { return lambda_; }
    int steps() const { return steps_; }
    Index active_size() const { return m_; }

private:
    void add(Index j, double sign);
    void remove(Index k);
    Vector solve_gram(const Vector &rhs) const;
    Vector active_combination(const Vector &w) const;
    void resync();

    const Matrix &A_;
    const Vector &y_;
    Index n_;
    Index q_;

    Matrix R_;
    Index m_ = 0;
    std::vector<Index> active_;
    Vector sign_;
    Vector beta_active_;
    std::vector<char> is_active_;
    std::vector<char> blocked_;
    Vector col_norm2_;

    Vector r_;
    Vector c_;
    Vector last_direction_; // u = A_S w on the last segment
    double lambda_ = 0.0;
    int steps_ = 0;
};

} // namespace tunefree::solvers::detail
