#include "oracles.hpp"
#include "tunefree/estimators.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tunefree;
using namespace tunefree::estimators;
using norms::NormKind;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Index>(xs.size()));
    Index i = 0;
    for (double x : xs)
        v[i++] = x;
    return v;
}

Matrix diag2(double a, double b) {
    Matrix D = Matrix::Zero(2, 2);
    D(0, 0) = a;
    D(1, 1) = b;
    return D;
}

/// Independent copy of the augmented design [X, sqrt(n) gamma I].
Matrix augmented(const Matrix &X) {
    const double n = static_cast<double>(X.rows());
    double gamma = 0.0;
    for (Index j = 0; j < X.cols(); ++j)
        gamma = std::max(gamma, X.col(j).norm() / std::sqrt(n));
    Matrix out(X.rows(), X.cols() + X.rows());
    out << X, std::sqrt(n) * gamma * Matrix::Identity(X.rows(), X.rows());
    return out;
}

} // namespace

TEST(EstimateSigma, Examples) {
    const Vector Z = vec({0.5, -1.0, 2.0});
    EXPECT_NEAR(estimate_sigma(NormKind::l1(), Vector(2.0 * Z), Z), 2.0, 1e-14);
    EXPECT_EQ(estimate_sigma(NormKind::l1(), Vector::Zero(3), Z), 0.0);
    EXPECT_DOUBLE_EQ(estimate_sigma(NormKind::l1(), vec({3, 0}), vec({1, 1})), 1.5);
    EXPECT_THROW(estimate_sigma(NormKind::l1(), Z, Vector::Zero(3)), InputError);
}

TEST(AbstractFit, Examples) {
    const norms::NormPair l1pair{NormKind::l1(), NormKind::l1()};
    auto fit = abstract_fit(l1pair, Vector::Zero(4), GaussianSampler(3));
    EXPECT_EQ(fit.sigma_hat, 0.0);
    EXPECT_EQ(fit.mu_hat, Vector::Zero(4));

    // |Z|_1 = 10 makes sigma_hat = 1 and the budget n sigma_hat^2 = 4.
    fit = abstract_fit(l1pair, vec({10, 0, 0, 0}), vec({2.5, -2.5, 2.5, 2.5}));
    EXPECT_NEAR(fit.sigma_hat, 1.0, 1e-14);
    EXPECT_NEAR((fit.mu_hat - vec({8, 0, 0, 0})).norm(), 0.0, 1e-10);

    // A tiny noise draw makes the budget exceed ||Y||^2.
    fit = abstract_fit(l1pair, vec({1, 1}), vec({0.1, 0.1}));
    EXPECT_EQ(fit.mu_hat, Vector::Zero(2));

    const norms::NormPair nuc{NormKind::nuclear(2, 2), NormKind::nuclear(2, 2)};
    const Matrix D = diag2(3, 1);
    const Matrix Z = diag2(2, 2);
    fit = abstract_fit(nuc, Eigen::Map<const Vector>(D.data(), 4),
                       Eigen::Map<const Vector>(Z.data(), 4));
    EXPECT_NEAR(fit.mu_hat[0], 3 - std::sqrt(3.0), 1e-10);
    EXPECT_NEAR(fit.mu_hat[3], 0.0, 1e-12);

    const norms::NormPair bad{NormKind::l2(), NormKind::l1()};
    EXPECT_THROW(abstract_fit(bad, vec({1, 1}), vec({1, 1})), InputError);
}

TEST(AbstractFit, DesignKindMatchesDirectPath) {
    std::mt19937_64 rng(71);
    const Matrix A = oracle::gaussian(6, 10, rng);
    const Vector Y = oracle::gaussian(6, 1, rng);
    const Vector Z = oracle::gaussian(6, 1, rng);
    const norms::NormPair pair{NormKind::design(A), NormKind::design(A)};
    const auto fit = abstract_fit(pair, Y, Z);
    const double budget = 6.0 * fit.sigma_hat * fit.sigma_hat;
    if (budget < Y.squaredNorm())
        EXPECT_NEAR((Y - fit.mu_hat).squaredNorm(), budget, 1e-3 * budget);
    EXPECT_NEAR(fit.sigma_hat,
                norms::norm_eval(NormKind::design(A), Y) /
                    norms::norm_eval(NormKind::design(A), Z),
                1e-12);
}

TEST(RegressionFit, ZeroResponse) {
    std::mt19937_64 rng(73);
    const Matrix X = oracle::gaussian(8, 12, rng);
    const auto fit = regression_fit(X, Vector::Zero(8), GaussianSampler(5));
    EXPECT_EQ(fit.m1, 0.0);
    EXPECT_EQ(fit.sigma_hat, 0.0);
    EXPECT_EQ(fit.beta_hat, Vector::Zero(12));
    EXPECT_TRUE(fit.support.empty());
}

TEST(RegressionFit, RejectsBadInput) {
    EXPECT_THROW(regression_fit(Matrix::Zero(3, 2), vec({1, 2, 3}), GaussianSampler(1)),
                 InputError);
    EXPECT_THROW(regression_fit(Matrix::Identity(3, 2), vec({1, 2}), GaussianSampler(1)),
                 InputError);
}

TEST(RegressionFit, DiagnosticsFollowTheProcedure) {
    std::mt19937_64 rng(79);
    const Matrix X = oracle::gaussian(15, 40, rng);
    Vector beta0 = Vector::Zero(40);
    beta0[3] = 2;
    beta0[17] = -1.5;
    const Vector Y = X * beta0 + 0.5 * oracle::gaussian(15, 1, rng);
    const Vector Z = oracle::gaussian(15, 1, rng);
    const auto fit = regression_fit(X, Y, Z);

    const Matrix Xt = augmented(X);
    EXPECT_NEAR(fit.gamma * std::sqrt(15.0), X.colwise().norm().maxCoeff(), 1e-12);
    EXPECT_NEAR(fit.sigma_hat, fit.m1 / fit.m2, 1e-14);
    EXPECT_NEAR(fit.m1, norms::norm_eval(NormKind::design(Xt), Y), 1e-9 * fit.m1);
    EXPECT_NEAR(fit.m2, norms::norm_eval(NormKind::design(Xt), Z), 1e-9 * fit.m2);
    EXPECT_EQ(fit.rank_k, 15);
    EXPECT_NEAR(fit.budget, 15 * fit.sigma_hat * fit.sigma_hat, 1e-12);
    EXPECT_NEAR(fit.residual_sq, fit.budget, 1e-3 * fit.budget);
    EXPECT_NEAR((fit.fitted - X * fit.beta_hat).norm(), 0.0, 1e-12);
}

TEST(RegressionFit, SampledNoiseIsDeterministic) {
    std::mt19937_64 rng(83);
    const Matrix X = oracle::gaussian(10, 25, rng);
    const Vector Y = oracle::gaussian(10, 1, rng);
    const auto a = regression_fit(X, Y, GaussianSampler(99, 4));
    const auto b = regression_fit(X, Y, GaussianSampler(99, 4));
    EXPECT_EQ(a.beta_hat, b.beta_hat);
    EXPECT_EQ(a.sigma_hat, b.sigma_hat);
    EXPECT_EQ(a.seed, 99u);
    EXPECT_EQ(a.stream, 4u);
    const auto c = regression_fit(X, Y, GaussianSampler(100, 4));
    EXPECT_NE(a.m2, c.m2);
}

TEST(RegressionFit, PositiveScaleEquivariance) {
    std::mt19937_64 rng(89);
    const Matrix X = oracle::gaussian(12, 30, rng);
    const Vector Y = oracle::gaussian(12, 1, rng) + 3.0 * X.col(2);
    const auto base = regression_fit(X, Y, GaussianSampler(7));
    for (double c : {0.01, 0.5, 3.0, 250.0}) {
        const auto scaled = regression_fit(X, Vector(c * Y), GaussianSampler(7));
        EXPECT_NEAR(scaled.sigma_hat, c * base.sigma_hat, 1e-6 * c * base.sigma_hat);
        EXPECT_LE((scaled.beta_hat - c * base.beta_hat).norm(),
                  1e-6 * c * std::max(1.0, base.beta_hat.norm()));
    }
}

TEST(RegressionFit, NoiselessDataIsInterpolatedWithinBudget) {
    std::mt19937_64 rng(97);
    const Matrix X = oracle::gaussian(20, 50, rng);
    Vector beta0 = Vector::Zero(50);
    beta0[0] = 1;
    beta0[5] = -2;
    const Vector Y = X * beta0;
    const auto fit = regression_fit(X, Y, GaussianSampler(1));
    EXPECT_LE((fit.fitted - Y).squaredNorm(), fit.rank_k * fit.sigma_hat * fit.sigma_hat * (1 + 1e-3));
}

TEST(Support, ThresholdRule) {
    EXPECT_EQ(support_threshold(vec({0, 0})), 1e-8);
    EXPECT_DOUBLE_EQ(support_threshold(vec({0, -1000})), 1e-3);
    const auto s = support_of(vec({1, 1e-9, -0.5, 0}), 1e-8);
    EXPECT_EQ(s, (std::vector<Index>{0, 2}));
}

TEST(MatrixFit, Examples) {
    auto fit = matrix_fit(Matrix::Zero(3, 2), GaussianSampler(2));
    EXPECT_EQ(fit.sigma_hat, 0.0);
    EXPECT_EQ(fit.m_hat, Matrix::Zero(3, 2));

    fit = matrix_fit(diag2(3, 1), diag2(2, 2));
    EXPECT_NEAR(fit.sigma_hat, 1.0, 1e-14);
    EXPECT_NEAR(fit.budget, 4.0, 1e-13);
    EXPECT_NEAR(fit.theta, std::sqrt(3.0), 1e-12);
    EXPECT_NEAR(fit.theta, oracle::bisect_cap(vec({3, 1}), 4.0), 1e-12);
    EXPECT_NEAR(fit.m_hat(0, 0), 3 - std::sqrt(3.0), 1e-12);
    EXPECT_NEAR(fit.m_hat(1, 1), 0.0, 1e-12);
    EXPECT_THROW(matrix_fit(diag2(1, 1), Matrix::Zero(2, 3)), InputError);
}

TEST(MatrixFit, OrthogonalAndScaleEquivariance) {
    std::mt19937_64 rng(103);
    for (int t = 0; t < 10; ++t) {
        const Matrix Y = oracle::gaussian(6, 4, rng) + 5 * oracle::gaussian(6, 1, rng) * oracle::gaussian(1, 4, rng);
        const Matrix Z = oracle::gaussian(6, 4, rng);
        const Matrix P = oracle::random_orthonormal(6, 6, rng);
        const Matrix Q = oracle::random_orthonormal(4, 4, rng);
        const auto base = matrix_fit(Y, Z);
        const auto rotated = matrix_fit(P * Y * Q.transpose(), Z);
        EXPECT_NEAR((rotated.m_hat - P * base.m_hat * Q.transpose()).norm(), 0.0, 1e-8);
        const auto scaled = matrix_fit(2.5 * Y, Z);
        EXPECT_NEAR((scaled.m_hat - 2.5 * base.m_hat).norm(), 0.0, 1e-8);
        if (base.m_hat.norm() > 0)
            EXPECT_NEAR((Y - base.m_hat).squaredNorm(), base.budget, 1e-9 * base.budget);
    }
}

TEST(RiskBounds, RegressionArithmetic) {
    auto b = regression_risk_bounds({100, 1000, 2.0, 0.0, 1.0});
    EXPECT_EQ(b.r, 0.0);
    b = regression_risk_bounds({100, 1000, 2.0, 2.0, 1.0});
    const double expected = std::sqrt(std::log(1100.0)) / 10.0;
    EXPECT_NEAR(b.r, expected, 1e-14);
    EXPECT_NEAR(b.r, 0.26463, 1e-5);
    ASSERT_EQ(b.risk_terms.size(), 4u);
    EXPECT_NEAR(b.bound_value, b.r + b.r * b.r + std::sqrt(std::log(1100.0) / 100) +
                                   std::log(1100.0) / 100,
                1e-14);
    EXPECT_NEAR(b.sigma_bound_value, b.r * b.r + std::log(1100.0) / 100, 1e-14);
    EXPECT_NEAR(b.m2_bound, 3 * std::sqrt(100 * std::log(1100.0)), 1e-12);
    EXPECT_THROW(regression_risk_bounds({100, 1000, 0.0, 2.0, 1.0}), InputError);
}

TEST(RiskBounds, MatrixArithmetic) {
    const auto b = matrix_risk_bounds({50, 50, 1.0, 50.0}, 0);
    EXPECT_NEAR(b.s, 50 * 2 * std::sqrt(50.0) / 2500, 1e-14);
    EXPECT_NEAR(b.s, 0.28284, 1e-5);
    EXPECT_NEAR(b.bound_value, b.s + b.s * b.s + 1.0 / 50, 1e-14);
    EXPECT_THROW(matrix_risk_bounds({50, 50, -1.0, 50.0}, 0), InputError);

    // The spectral-norm moments of a Gaussian matrix sit near sqrt(l) + sqrt(m).
    const auto mc = matrix_risk_bounds({30, 20, 1.0, 1.0}, 100, 3);
    EXPECT_NEAR(mc.m2_bound, std::sqrt(30.0) + std::sqrt(20.0), 1.0);
    EXPECT_GE(mc.m4_bound, mc.m2_bound);
}

TEST(RiskBounds, SigmaMseBound) {
    EXPECT_TRUE(std::isinf(sigma_mse_bound(4, 1.0, 1.0, 1.0, 1.0, 1.0)));
    EXPECT_NEAR(sigma_mse_bound(12, 2.0, 1.5, 0.5, 3.0, 4.0),
                4.0 * 9.0 / 100.0 + 32 * std::sqrt(2.0) * 2.25 * 0.25 * 16.0 / 64.0, 1e-13);
}
