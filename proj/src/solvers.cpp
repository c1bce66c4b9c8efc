#include "tunefree/solvers.hpp"

#include "lasso_path.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace tunefree::solvers {

void SolverSettings::validate() const {
    if (max_iterations < 1)
        throw InputError("max_iterations must be at least 1");
    if (!(primal_tolerance > 0.0) || !(dual_tolerance > 0.0) ||
        !(budget_root_tolerance > 0.0))
        throw InputError("solver tolerances must be strictly positive");
}

BasisPursuitResult basis_pursuit(const Matrix &A, const Vector &y,
                                 const SolverSettings &settings) {
    settings.validate();
    if (A.rows() != y.size())
        throw InputError("basis_pursuit: A has " + std::to_string(A.rows()) +
                         " rows but y has length " + std::to_string(y.size()));
    if (A.rows() == 0)
        throw InputError("basis_pursuit: empty system");
    if (A.cols() == 0 || A.isZero(0.0))
        throw SolverError("constraint matrix is all-zero (rank deficient)",
                          "basis_pursuit");

    detail::LassoPath path(A, y);
    path.run(-1.0, settings.max_iterations);

    BasisPursuitResult out;
    out.beta = path.beta();
    out.objective = out.beta.lpNorm<1>();
    out.dual_certificate = path.certificate();
    out.iterations = path.steps();

    const double resid = (A * out.beta - y).norm();
    if (resid > settings.primal_tolerance * std::max(1.0, y.norm()))
        throw SolverError("target is not in the range of A (rank deficient); "
                          "residual " + std::to_string(resid),
                          "basis_pursuit");
    return out;
}

Vector l1_constrained_ls(const Matrix &X, const Vector &y, double budget,
                         const SolverSettings &settings) {
    settings.validate();
    if (X.rows() != y.size())
        throw InputError("l1_constrained_ls: X has " + std::to_string(X.rows()) +
                         " rows but y has length " + std::to_string(y.size()));
    if (!(budget >= 0.0))
        throw InputError("l1_constrained_ls: budget must be nonnegative");
    if (y.squaredNorm() <= budget)
        return Vector::Zero(X.cols());

    detail::LassoPath path(X, y);
    const auto stop = path.run(budget, settings.max_iterations);
    Vector beta = path.beta();
    if (stop == detail::LassoPath::Stop::PenaltyZero) {
        const double floor = (y - X * beta).squaredNorm();
        const double slack = settings.primal_tolerance *
                             std::max(1.0, y.squaredNorm());
        if (floor > budget * (1.0 + settings.budget_root_tolerance) + slack)
            throw SolverError("infeasible: residual floor " +
                                  std::to_string(floor) + " exceeds budget " +
                                  std::to_string(budget),
                              "l1_constrained_ls");
    }
    return beta;
}

Svd svd(const Matrix &M) {
    if (!M.allFinite())
        throw InputError("svd: matrix has non-finite entries");
    Svd out;
    if (M.size() == 0) {
        out.U = Matrix(M.rows(), 0);
        out.V = Matrix(M.cols(), 0);
        out.s = Vector(0);
        return out;
    }
    Eigen::BDCSVD<Matrix> dec(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (dec.info() != Eigen::Success)
        throw SolverError("SVD did not converge", "svd");
    out.U = dec.matrixU();
    out.s = dec.singularValues();
    out.V = dec.matrixV();
    return out;
}

double capped_square_root(const Vector &s, double budget) {
    if (s.size() == 0 || budget <= 0.0)
        return 0.0;
    std::vector<double> desc(s.data(), s.data() + s.size());
    std::sort(desc.begin(), desc.end(), std::greater<>());
    double total = 0.0;
    for (double v : desc)
        total += v * v;
    if (budget >= total)
        return desc.front();

    // On [desc[j], desc[j-1]] the map theta -> sum min(s_i, theta)^2 equals
    // j * theta^2 + sum_{i >= j} desc[i]^2.
    double tail = total;
    for (std::size_t j = 1; j <= desc.size(); ++j) {
        tail -= desc[j - 1] * desc[j - 1];
        const double lower = j < desc.size() ? desc[j] : 0.0;
        const double theta = std::sqrt(std::max(0.0, budget - tail) /
                                       static_cast<double>(j));
        if (theta >= lower)
            return std::min(theta, desc[j - 1]);
    }
    return 0.0;
}

NuclearResult nuclear_constrained(const Matrix &Y, double budget) {
    if (!(budget >= 0.0))
        throw InputError("nuclear_constrained: budget must be nonnegative");
    NuclearResult out;
    if (budget == 0.0) {
        out.m_hat = Y;
        out.theta = 0.0;
        return out;
    }
    const Svd dec = svd(Y);
    out.theta = capped_square_root(dec.s, budget);
    if (dec.s.squaredNorm() <= budget) {
        out.m_hat = Matrix::Zero(Y.rows(), Y.cols());
        return out;
    }
    const Vector shrunk = (dec.s.array() - out.theta).max(0.0).matrix();
    out.m_hat = dec.U * shrunk.asDiagonal() * dec.V.transpose();
    return out;
}

double default_rank_tolerance(Index rows, Index cols) {
    return 1e-10 * static_cast<double>(std::max<Index>({rows, cols, 1}));
}

Projection column_space_projection(const Matrix &X, const Vector &y,
                                   double rank_tolerance) {
    if (X.rows() != y.size())
        throw InputError("column_space_projection: X has " +
                         std::to_string(X.rows()) + " rows but y has length " +
                         std::to_string(y.size()));
    if (rank_tolerance < 0.0)
        rank_tolerance = default_rank_tolerance(X.rows(), X.cols());

    Projection out;
    if (X.size() == 0) {
        out.y_prime = Vector::Zero(y.size());
        return out;
    }
    Eigen::BDCSVD<Matrix> dec(X, Eigen::ComputeThinU);
    if (dec.info() != Eigen::Success)
        throw SolverError("SVD did not converge", "column_space_projection");
    const Vector &s = dec.singularValues();
    const double cutoff = rank_tolerance * s[0];
    Index k = 0;
    while (k < s.size() && s[k] > cutoff && s[k] > 0.0)
        ++k;
    out.rank = k;
    const auto Uk = dec.matrixU().leftCols(k);
    out.y_prime = Uk * (Uk.transpose() * y);
    return out;
}

} // namespace tunefree::solvers
