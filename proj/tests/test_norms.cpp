#include "oracles.hpp"
#include "tunefree/norms.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tunefree;
using norms::NormKind;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Index>(xs.size()));
    Index i = 0;
    for (double x : xs)
        v[i++] = x;
    return v;
}

Vector flat(const Matrix &M) { return Eigen::Map<const Vector>(M.data(), M.size()); }

std::vector<NormKind> kinds_for(Index dim) {
    // dim = 6 doubles as a 2x3 matrix.
    Matrix A(3, 6);
    A << 1, 0, 0, 1, 2, 0,
         0, 1, 0, -1, 0, 1,
         0, 0, 1, 0.5, 1, -1;
    std::vector<NormKind> kinds = {NormKind::l1(), NormKind::l2(), NormKind::sup()};
    if (dim == 6) {
        kinds.push_back(NormKind::nuclear(2, 3));
        kinds.push_back(NormKind::spectral(2, 3));
    }
    if (dim == 3)
        kinds.push_back(NormKind::design(A));
    return kinds;
}

} // namespace

TEST(NormEval, WorkedExamples) {
    EXPECT_DOUBLE_EQ(norms::norm_eval(NormKind::l1(), vec({1, -2, 3})), 6.0);
    EXPECT_NEAR(norms::norm_eval(NormKind::design(Matrix::Identity(3, 3)), vec({1, -2, 3})),
                6.0, 1e-9);
    Matrix D = Matrix::Zero(2, 2);
    D(0, 0) = 3;
    D(1, 1) = 1;
    EXPECT_NEAR(norms::norm_eval(NormKind::nuclear(2, 2), flat(D)), 4.0, 1e-12);
}

TEST(NormEval, DesignMatchesVertexEnumeration) {
    Matrix A(1, 2);
    A << 1, 1;
    const double oracle_value = oracle::l1_min_by_vertices(A, vec({2}));
    EXPECT_NEAR(oracle_value, 2.0, 1e-12);
    EXPECT_NEAR(norms::norm_eval(NormKind::design(A), vec({2})), oracle_value, 1e-9);

    std::mt19937_64 rng(11);
    for (int t = 0; t < 40; ++t) {
        const Matrix B = oracle::gaussian(3, 6, rng);
        const Vector x = oracle::gaussian(3, 1, rng);
        EXPECT_NEAR(norms::norm_eval(NormKind::design(B), x),
                    oracle::l1_min_by_vertices(B, x), 1e-7);
    }
}

TEST(NormEval, RejectsWrongShapesAndRankDeficientDesign) {
    EXPECT_THROW(norms::norm_eval(NormKind::nuclear(2, 2), vec({1, 2, 3})), InputError);
    Matrix A(2, 3);
    A << 1, 2, 3, 2, 4, 6;
    EXPECT_THROW(NormKind::design(A), InputError);
    EXPECT_THROW(NormKind::design(Matrix::Identity(3, 2)), InputError);
    EXPECT_THROW(norms::dual_kind(NormKind::design(Matrix::Identity(2, 2))), InputError);
}

TEST(DualNorm, WorkedExamples) {
    EXPECT_DOUBLE_EQ(norms::dual_norm_eval(NormKind::l1(), vec({1, -2, 3})), 3.0);
    Matrix D = Matrix::Zero(2, 2);
    D(0, 0) = 3;
    D(1, 1) = 1;
    EXPECT_NEAR(norms::dual_norm_eval(NormKind::nuclear(2, 2), flat(D)), 3.0, 1e-12);
}

TEST(DualNorm, MonteCarloSupremumApproachesFromBelow) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 5; ++t) {
        const Vector x = oracle::gaussian(4, 1, rng);
        const double closed = norms::dual_norm_eval(NormKind::l1(), x);
        const double sampled = oracle::l1_dual_monte_carlo(x, 100000, rng);
        EXPECT_LE(sampled, closed + 1e-12);
        EXPECT_GE(sampled, closed - 1e-6 * std::max(1.0, closed));
    }
}

TEST(DualNorm, DesignDualIsColumnMaximum) {
    std::mt19937_64 rng(8);
    const Matrix A = oracle::gaussian(3, 7, rng);
    const Vector x = oracle::gaussian(3, 1, rng);
    double expected = 0.0;
    for (Index j = 0; j < A.cols(); ++j)
        expected = std::max(expected, std::abs(A.col(j).dot(x)));
    EXPECT_NEAR(norms::dual_norm_eval(NormKind::design(A), x), expected, 1e-12);
}

TEST(NormProperties, HomogeneityAndTriangleInequality) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> scale(-5.0, 5.0);
    for (Index dim : {3, 6}) {
        for (const auto &kind : kinds_for(dim)) {
            const int trials = kind.tag() == norms::NormTag::Design ? 100 : 1000;
            for (int t = 0; t < trials; ++t) {
                const Vector x = oracle::gaussian(dim, 1, rng);
                const Vector y = oracle::gaussian(dim, 1, rng);
                const double c = scale(rng);
                const double kx = norms::norm_eval(kind, x);
                const double ky = norms::norm_eval(kind, y);
                const double kcx = norms::norm_eval(kind, Vector(c * x));
                const double kxy = norms::norm_eval(kind, Vector(x + y));
                const double tol = kind.tag() == norms::NormTag::Design ? 1e-7 : 1e-9;
                EXPECT_NEAR(kcx, std::abs(c) * kx, tol * std::max(1.0, std::abs(c) * kx))
                    << kind.name();
                EXPECT_LE(kxy, (kx + ky) * (1 + tol)) << kind.name();
            }
        }
    }
}

TEST(NormProperties, CauchySchwarzAndBiduality) {
    std::mt19937_64 rng(3);
    for (Index dim : {3, 6}) {
        for (const auto &kind : kinds_for(dim)) {
            for (int t = 0; t < 200; ++t) {
                const Vector x = oracle::gaussian(dim, 1, rng);
                const double tol = kind.tag() == norms::NormTag::Design ? 1e-7 : 1e-9;
                EXPECT_GE(norms::norm_eval(kind, x) * norms::dual_norm_eval(kind, x),
                          x.squaredNorm() * (1 - tol))
                    << kind.name();
                if (kind.tag() != norms::NormTag::Design) {
                    const auto dual = norms::dual_kind(kind);
                    EXPECT_NEAR(norms::dual_norm_eval(dual, x), norms::norm_eval(kind, x),
                                1e-9 * std::max(1.0, norms::norm_eval(kind, x)));
                    EXPECT_EQ(norms::dual_kind(dual).tag(), kind.tag());
                }
            }
        }
    }
}

TEST(ProjectBall, WorkedExamples) {
    const Vector w1 = norms::project_ball(NormKind::l1(), vec({2, 0}), 1.0);
    EXPECT_NEAR((w1 - vec({1, 0})).norm(), 0.0, 1e-12);
    const Vector w2 = norms::project_ball(NormKind::l1(), vec({2, 1}), 1.0);
    EXPECT_NEAR((w2 - oracle::project_l1_bisect(vec({2, 1}), 1.0)).norm(), 0.0, 1e-12);
    EXPECT_NEAR((w2 - vec({1, 0})).norm(), 0.0, 1e-12);
    const Vector x = vec({0.3, -0.4});
    EXPECT_EQ(norms::project_ball(NormKind::l2(), x, 1.0), x);
    EXPECT_THROW(norms::project_ball(NormKind::l1(), x, -1.0), InputError);
    EXPECT_THROW(norms::project_ball(NormKind::sup(), x, 1.0), InputError);
}

TEST(ProjectBall, MatchesBisectionAndIsNearestFeasiblePoint) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> radius(0.05, 4.0);
    for (const auto &kind : {NormKind::l1(), NormKind::l2(), NormKind::nuclear(2, 3)}) {
        for (int t = 0; t < 50; ++t) {
            const Vector x = 2.0 * oracle::gaussian(6, 1, rng);
            const double L = radius(rng);
            const Vector w = norms::project_ball(kind, x, L);
            EXPECT_LE(norms::norm_eval(kind, w), L + 1e-9);
            if (kind.tag() == norms::NormTag::L1) {
                EXPECT_NEAR((w - oracle::project_l1_bisect(x, L)).norm(), 0.0, 1e-9);
            }
            for (int v = 0; v < 200; ++v) {
                Vector cand = oracle::gaussian(6, 1, rng);
                const double kc = norms::norm_eval(kind, cand);
                if (kc > L)
                    cand *= L / kc * std::uniform_real_distribution<double>(0, 1)(rng);
                EXPECT_LE((x - w).norm(), (x - cand).norm() + 1e-9);
            }
        }
    }
}

TEST(ProjectBall, NuclearProjectionShrinksSingularValues) {
    Matrix D = Matrix::Zero(2, 3);
    D(0, 0) = 3;
    D(1, 1) = 1;
    const Vector w = norms::project_ball(NormKind::nuclear(2, 3), flat(D), 2.0);
    Matrix expected = Matrix::Zero(2, 3);
    expected(0, 0) = 2;
    EXPECT_NEAR((w - flat(expected)).norm(), 0.0, 1e-12);
}
