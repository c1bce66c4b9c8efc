#pragma once

#include "tunefree/norms.hpp"
#include "tunefree/random.hpp"
#include "tunefree/solvers.hpp"
#include "tunefree/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tunefree::estimators {

using solvers::SolverSettings;

/// K(Y) / K(Z). Throws InputError when K(Z) == 0.
double estimate_sigma(const norms::NormKind &Ktilde, const Vector &Y,
                      const Vector &Z, const SolverSettings &settings = {});

struct AbstractFit {
    Vector mu_hat;
    double sigma_hat = 0.0;
};

/// argmin{ K(nu) : ||Y - nu||^2 <= n sigma_hat^2 } with sigma_hat measured
/// by Ktilde against the supplied noise draw. K must be L1, Design or Nuclear.
AbstractFit abstract_fit(const norms::NormPair &pair, const Vector &Y,
                         const Vector &Z, const SolverSettings &settings = {});

/// Same, drawing Z ~ N(0, I_n) from the sampler.
AbstractFit abstract_fit(const norms::NormPair &pair, const Vector &Y,
                         GaussianSampler sampler,
                         const SolverSettings &settings = {});

struct RegressionFit {
    Vector beta_hat;
    double sigma_hat = 0.0;
    Vector fitted;                  // X beta_hat
    std::vector<Index> support;     // zero-based column indices
    double support_threshold = 0.0;
    double gamma = 0.0;             // max_j ||X_j|| / sqrt(n)
    double m1 = 0.0;                // min-l1 cost of Y under [X, sqrt(n) gamma I]
    double m2 = 0.0;                // same for Z
    Index rank_k = 0;
    double residual_sq = 0.0;       // ||Y' - X beta_hat||^2
    double budget = 0.0;            // rank_k * sigma_hat^2
    int path_steps_m1 = 0;
    int path_steps_m2 = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<std::string> warnings;
};

/// Support threshold for a coefficient vector: 1e-6 * max|beta_j|, floored
/// at 1e-8.
double support_threshold(const Vector &beta);
std::vector<Index> support_of(const Vector &beta, double threshold);

/// The tuning-free regression estimator with an explicit noise draw Z.
RegressionFit regression_fit(const Matrix &X, const Vector &Y, const Vector &Z,
                             const SolverSettings &settings = {});

/// The tuning-free regression estimator; Z ~ N(0, I_n) comes from sampler.
RegressionFit regression_fit(const Matrix &X, const Vector &Y,
                             GaussianSampler sampler,
                             const SolverSettings &settings = {});

struct MatrixFit {
    Matrix m_hat;
    double sigma_hat = 0.0;
    double theta = 0.0;
    double nuclear_y = 0.0;
    double nuclear_z = 0.0;
    double budget = 0.0;     // l m sigma_hat^2
    Vector singular_values;  // of Y
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

MatrixFit matrix_fit(const Matrix &Y, const Matrix &Z);
MatrixFit matrix_fit(const Matrix &Y, GaussianSampler sampler);

// ---------------------------------------------------------------------------
// Risk-bound arithmetic. Every bound is reported with the universal constant
// C = 1 together with its additive terms, so callers can scale by any C.

struct RegressionProblem {
    Index n = 0;
    Index p = 0;
    double sigma = 0.0;
    double beta0_l1 = 0.0;
    double gamma = 0.0;
};

struct MatrixProblem {
    Index l = 0;
    Index m = 0;
    double sigma = 0.0;
    double nuclear = 0.0;
};

struct RiskBound {
    double r = 0.0; // regression rate
    double s = 0.0; // matrix rate
    double a = 0.0; // Euclidean radius of the dual unit ball (upper bound)
    double m2_bound = 0.0;
    double m4_bound = 0.0;
    /// Prediction-risk right-hand side with C = 1 (sum of risk_terms).
    double bound_value = 0.0;
    std::vector<double> risk_terms;
    /// sigma-risk right-hand side E(sigma_hat / sigma - 1)^2, C = 1.
    double sigma_bound_value = 0.0;
    std::vector<double> sigma_terms;
    /// Explicit-constant bound on E(sigma_hat - sigma)^2 from the K(Y)/K(Z)
    /// noise estimator, evaluated with a and m_k above.
    double sigma_mse_bound = 0.0;
};

/// r, the four-term prediction bound, the sigma bound and the explicit
/// sigma-MSE bound with a <= 1/gamma and m_k <= 3 gamma sqrt(n log(p+n)).
RiskBound regression_risk_bounds(const RegressionProblem &problem);

/// s, the three-term matrix bound and sigma bound. m_k is estimated by Monte
/// Carlo over `samples` draws of the spectral norm of an l x m Gaussian
/// matrix (samples = 0 skips it and leaves the sigma-MSE bound at 0).
RiskBound matrix_risk_bounds(const MatrixProblem &problem, int samples = 200,
                             std::uint64_t seed = 0);

/// sup over the dual unit ball of ||v|| and dual-norm moments into the
/// explicit K(Y)/K(Z) bound:
///   K(mu)^2 m2^2 / (n-2)^2 + 32 sqrt(2) sigma^2 a^2 m4^2 / (n-4)^2.
double sigma_mse_bound(Index n, double k_mu, double sigma, double a, double m2,
                       double m4);

} // namespace tunefree::estimators
