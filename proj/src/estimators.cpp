#include "tunefree/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tunefree::estimators {

using norms::NormKind;
using norms::NormTag;

double estimate_sigma(const NormKind &Ktilde, const Vector &Y, const Vector &Z,
                      const SolverSettings &settings) {
    if (Y.size() != Z.size())
        throw InputError("estimate_sigma: Y and Z differ in length");
    const double kz = norms::norm_eval(Ktilde, Z, settings);
    if (!(kz > 0.0))
        throw InputError("estimate_sigma: the noise draw Z has zero norm");
    return norms::norm_eval(Ktilde, Y, settings) / kz;
}

AbstractFit abstract_fit(const norms::NormPair &pair, const Vector &Y,
                         const Vector &Z, const SolverSettings &settings) {
    pair.validate();
    const Index n = Y.size();
    if (auto dim = pair.K.ambient_dim(); dim && *dim != n)
        throw InputError("abstract_fit: K expects length " +
                         std::to_string(*dim));

    AbstractFit out;
    out.sigma_hat = estimate_sigma(pair.Ktilde, Y, Z, settings);
    const double budget = static_cast<double>(n) * out.sigma_hat * out.sigma_hat;

    switch (pair.K.tag()) {
    case NormTag::L1: {
        const Matrix identity = Matrix::Identity(n, n);
        out.mu_hat = solvers::l1_constrained_ls(identity, Y, budget, settings);
        break;
    }
    case NormTag::Design: {
        const Matrix &A = pair.K.design_matrix();
        out.mu_hat = A * solvers::l1_constrained_ls(A, Y, budget, settings);
        break;
    }
    case NormTag::Nuclear: {
        const Matrix Ym = as_matrix(Y, pair.K.rows(), pair.K.cols());
        out.mu_hat = as_vector(solvers::nuclear_constrained(Ym, budget).m_hat);
        break;
    }
    default:
        throw InputError("abstract_fit: no budget-constrained minimizer for the " +
                         pair.K.name() + " norm");
    }
    return out;
}

AbstractFit abstract_fit(const norms::NormPair &pair, const Vector &Y,
                         GaussianSampler sampler,
                         const SolverSettings &settings) {
    const Vector Z = sampler.normal_vector(Y.size());
    return abstract_fit(pair, Y, Z, settings);
}

double support_threshold(const Vector &beta) {
    const double peak = beta.size() ? beta.cwiseAbs().maxCoeff() : 0.0;
    return std::max(1e-6 * peak, 1e-8);
}

std::vector<Index> support_of(const Vector &beta, double threshold) {
    std::vector<Index> out;
    for (Index j = 0; j < beta.size(); ++j)
        if (std::abs(beta[j]) > threshold)
            out.push_back(j);
    return out;
}

RegressionFit regression_fit(const Matrix &X, const Vector &Y, const Vector &Z,
                             const SolverSettings &settings) {
    settings.validate();
    const Index n = X.rows();
    const Index p = X.cols();
    if (n < 1 || p < 1)
        throw InputError("regression_fit: design must be at least 1 x 1");
    if (Y.size() != n || Z.size() != n)
        throw InputError("regression_fit: design has " + std::to_string(n) +
                         " rows but response has length " +
                         std::to_string(Y.size()));
    if (!X.allFinite() || !Y.allFinite())
        throw InputError("regression_fit: non-finite input");

    RegressionFit fit;
    const double root_n = std::sqrt(static_cast<double>(n));
    fit.gamma = X.colwise().norm().maxCoeff() / root_n;
    if (!(fit.gamma > 0.0))
        throw InputError("regression_fit: design matrix is zero");

    // Augmented design [X, sqrt(n) gamma I] has full row rank by construction.
    Matrix augmented(n, p + n);
    augmented.leftCols(p) = X;
    augmented.rightCols(n) = (root_n * fit.gamma) * Matrix::Identity(n, n);

    try {
        const auto bp = solvers::basis_pursuit(augmented, Y, settings);
        fit.m1 = bp.objective;
        fit.path_steps_m1 = bp.iterations;
    } catch (const SolverError &e) {
        throw SolverError(e, "step 4 (M1 basis pursuit)");
    }
    try {
        const auto bp = solvers::basis_pursuit(augmented, Z, settings);
        fit.m2 = bp.objective;
        fit.path_steps_m2 = bp.iterations;
    } catch (const SolverError &e) {
        throw SolverError(e, "step 4 (M2 basis pursuit)");
    }
    if (!(fit.m2 > 0.0))
        throw InputError("regression_fit: the noise draw Z is zero");
    fit.sigma_hat = fit.m1 / fit.m2;
    if (fit.m2 < 1e-8 * Z.norm())
        fit.warnings.push_back("M2 is unusually small; sigma_hat may be inflated");

    solvers::Projection proj;
    try {
        proj = solvers::column_space_projection(X, Y);
    } catch (const SolverError &e) {
        throw SolverError(e, "step 6 (column-space projection)");
    }
    fit.rank_k = proj.rank;
    fit.budget = static_cast<double>(fit.rank_k) * fit.sigma_hat * fit.sigma_hat;
    try {
        fit.beta_hat =
            solvers::l1_constrained_ls(X, proj.y_prime, fit.budget, settings);
    } catch (const SolverError &e) {
        throw SolverError(e, "step 7 (budget-constrained l1)");
    }

    fit.fitted = X * fit.beta_hat;
    fit.residual_sq = (proj.y_prime - fit.fitted).squaredNorm();
    fit.support_threshold = support_threshold(fit.beta_hat);
    fit.support = support_of(fit.beta_hat, fit.support_threshold);
    return fit;
}

RegressionFit regression_fit(const Matrix &X, const Vector &Y,
                             GaussianSampler sampler,
                             const SolverSettings &settings) {
    const Vector Z = sampler.normal_vector(X.rows());
    RegressionFit fit = regression_fit(X, Y, Z, settings);
    fit.seed = sampler.seed();
    fit.stream = sampler.stream();
    return fit;
}

MatrixFit matrix_fit(const Matrix &Y, const Matrix &Z) {
    if (Y.rows() < 1 || Y.cols() < 1)
        throw InputError("matrix_fit: matrix must be at least 1 x 1");
    if (Y.rows() != Z.rows() || Y.cols() != Z.cols())
        throw InputError("matrix_fit: Y and Z differ in shape");
    if (!Y.allFinite())
        throw InputError("matrix_fit: non-finite input");

    MatrixFit fit;
    const auto dec = solvers::svd(Y);
    fit.singular_values = dec.s;
    fit.nuclear_y = dec.s.sum();
    fit.nuclear_z = solvers::svd(Z).s.sum();
    if (!(fit.nuclear_z > 0.0))
        throw InputError("matrix_fit: the noise draw Z is zero");
    fit.sigma_hat = fit.nuclear_y / fit.nuclear_z;
    fit.budget = static_cast<double>(Y.size()) * fit.sigma_hat * fit.sigma_hat;
    auto res = solvers::nuclear_constrained(Y, fit.budget);
    fit.m_hat = std::move(res.m_hat);
    fit.theta = res.theta;
    return fit;
}

MatrixFit matrix_fit(const Matrix &Y, GaussianSampler sampler) {
    const Matrix Z = sampler.normal_matrix(Y.rows(), Y.cols());
    MatrixFit fit = matrix_fit(Y, Z);
    fit.seed = sampler.seed();
    fit.stream = sampler.stream();
    return fit;
}

double sigma_mse_bound(Index n, double k_mu, double sigma, double a, double m2,
                       double m4) {
    if (n <= 4)
        return std::numeric_limits<double>::infinity();
    const double n2 = static_cast<double>(n - 2);
    const double n4 = static_cast<double>(n - 4);
    return k_mu * k_mu * m2 * m2 / (n2 * n2) +
           32.0 * std::sqrt(2.0) * sigma * sigma * a * a * m4 * m4 / (n4 * n4);
}

RiskBound regression_risk_bounds(const RegressionProblem &pb) {
    if (!(pb.sigma > 0.0))
        throw InputError("risk bounds need sigma > 0");
    if (pb.n < 1 || pb.p < 1)
        throw InputError("risk bounds need n, p >= 1");
    if (!(pb.gamma > 0.0) || pb.beta0_l1 < 0.0)
        throw InputError("risk bounds need gamma > 0 and |beta0|_1 >= 0");

    const double n = static_cast<double>(pb.n);
    const double log_pn = std::log(static_cast<double>(pb.p + pb.n));
    RiskBound out;
    out.r = pb.beta0_l1 * pb.gamma / pb.sigma * std::sqrt(log_pn / n);
    out.risk_terms = {out.r, out.r * out.r, std::sqrt(log_pn / n), log_pn / n};
    out.sigma_terms = {out.r * out.r, log_pn / n};
    for (double t : out.risk_terms)
        out.bound_value += t;
    for (double t : out.sigma_terms)
        out.sigma_bound_value += t;

    out.a = 1.0 / pb.gamma;
    out.m2_bound = 3.0 * pb.gamma * std::sqrt(n * log_pn);
    out.m4_bound = out.m2_bound;
    out.sigma_mse_bound = sigma_mse_bound(pb.n, pb.beta0_l1, pb.sigma, out.a,
                                          out.m2_bound, out.m4_bound);
    return out;
}

RiskBound matrix_risk_bounds(const MatrixProblem &pb, int samples,
                             std::uint64_t seed) {
    if (!(pb.sigma > 0.0))
        throw InputError("risk bounds need sigma > 0");
    if (pb.l < 1 || pb.m < 1)
        throw InputError("risk bounds need l, m >= 1");
    if (pb.nuclear < 0.0)
        throw InputError("risk bounds need a nonnegative nuclear norm");

    const double l = static_cast<double>(pb.l);
    const double m = static_cast<double>(pb.m);
    RiskBound out;
    out.s = pb.nuclear * (std::sqrt(l) + std::sqrt(m)) / (l * m * pb.sigma);
    out.risk_terms = {out.s, out.s * out.s, std::sqrt(1.0 / (l * m))};
    out.sigma_terms = {out.s * out.s, 1.0 / (l * m)};
    for (double t : out.risk_terms)
        out.bound_value += t;
    for (double t : out.sigma_terms)
        out.sigma_bound_value += t;
    out.a = std::sqrt(std::min(l, m));

    if (samples > 0) {
        GaussianSampler sampler(seed, 0x6d6b);
        double sum2 = 0.0;
        double sum4 = 0.0;
        for (int i = 0; i < samples; ++i) {
            const Matrix Z = sampler.normal_matrix(pb.l, pb.m);
            const double op = solvers::svd(Z).s[0];
            sum2 += op * op;
            sum4 += op * op * op * op;
        }
        out.m2_bound = std::sqrt(sum2 / samples);
        out.m4_bound = std::pow(sum4 / samples, 0.25);
        out.sigma_mse_bound = sigma_mse_bound(pb.l * pb.m, pb.nuclear, pb.sigma,
                                              out.a, out.m2_bound, out.m4_bound);
    }
    return out;
}

} // namespace tunefree::estimators
