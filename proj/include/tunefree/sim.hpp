#pragma once

#include "tunefree/estimators.hpp"
#include "tunefree/solvers.hpp"
#include "tunefree/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tunefree::sim {

// ---------------------------------------------------------------------------
// Lasso baseline: coordinate descent on (1/2n)||y - X beta||^2 + lambda |beta_pen|_1.

struct LassoOptions {
    int folds = 10;
    int grid_size = 100;
    double min_ratio = 1e-4;
    std::vector<Index> unpenalized; // columns without the l1 penalty
    double tolerance = 1e-7;        // relative to the null deviance
    int max_sweeps = 100000;
};

/// Smallest penalty with every penalized coefficient at zero.
double lambda_max(const Matrix &X, const Vector &y,
                  const std::vector<Index> &unpenalized);

/// Geometric grid from lambda_max down to min_ratio * lambda_max.
Vector lambda_grid(double lambda_max, int grid_size, double min_ratio);

/// Coordinate-descent solution at a single penalty, optionally warm started.
Vector lasso_fit(const Matrix &X, const Vector &y, double lambda,
                 const LassoOptions &options = {},
                 const Vector *warm_start = nullptr);

/// Solutions along a decreasing grid with warm starts; one column per lambda.
Matrix lasso_path(const Matrix &X, const Vector &y, const Vector &lambdas,
                  const LassoOptions &options = {});

struct CvLassoResult {
    Vector beta;
    double lambda = 0.0;
    Index lambda_index = 0;
    Vector lambdas;
    Vector cv_error; // pooled held-out mean squared error per lambda
};

/// K-fold cross-validated Lasso: folds from a seeded shuffle, penalty chosen
/// by minimum pooled CV error, then refit on all rows.
CvLassoResult cv_lasso(const Matrix &X, const Vector &y,
                       const LassoOptions &options, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Data generation and metrics.

/// n x (p + 1) design: column 0 is the all-ones intercept, the rest i.i.d.
/// N(0, 1).
Matrix gen_design(Index n, Index p, std::uint64_t seed);

/// X beta0 + sigma * N(0, I_n).
Vector gen_response(const Matrix &X, const Vector &beta0, double sigma,
                    std::uint64_t seed);

/// ||X beta_hat - X beta0||^2 / n.
double prediction_error(const Matrix &X, const Vector &beta_hat,
                        const Vector &beta0);

struct Selection {
    int true_positives = 0;
    int false_positives = 0;
};

/// Counts over coordinates other than `excluded` (the intercept by default).
Selection selection_metrics(const Vector &beta_hat, const Vector &beta0,
                            double threshold,
                            const std::vector<Index> &excluded = {0});

// ---------------------------------------------------------------------------
// Regression scenarios.

struct Scenario {
    std::string label;
    Index n = 0;
    Index p = 0;
    double sigma = 0.0;
    std::vector<std::pair<Index, double>> beta0; // covariate index in [1, p]
    int replications = 0;
    std::uint64_t base_seed = 0;

    void validate() const;
    /// Length p + 1 with a zero intercept at index 0.
    Vector beta0_vector() const;
    std::string formula() const; // e.g. "x1+2x2"
};

enum class Method { Proposed, CvLasso };
const char *method_name(Method m);

enum class SeedPurpose : std::uint64_t {
    Design = 1,
    Noise = 2,
    Estimator = 3,
    CrossValidation = 4,
    MatrixSignal = 5,
    MatrixNoise = 6,
    MatrixEstimator = 7,
};

struct ReplicationRecord {
    int replication = 0;
    Method method = Method::Proposed;
    std::uint64_t design_seed = 0;
    std::uint64_t noise_seed = 0;
    std::uint64_t method_seed = 0;
    bool ok = false;
    std::string error;
    int true_positives = 0;
    int false_positives = 0;
    double prediction_error = 0.0;
    std::optional<double> normalized_prediction_error;
    double seconds = 0.0;
    // Proposed-estimator diagnostics.
    double sigma_hat = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
    double gamma = 0.0;
    Index rank_k = 0;
    double residual_sq = 0.0;
    double budget = 0.0;
    // Lasso diagnostics.
    double lambda = 0.0;
};

struct MethodSummary {
    Method method = Method::Proposed;
    int successes = 0;
    int failures = 0;
    double avg_true_positives = 0.0;
    double avg_false_positives = 0.0;
    double avg_prediction_error = 0.0;
    std::optional<double> avg_normalized_prediction_error;
    double elapsed_seconds = 0.0;
};

struct SimSettings {
    solvers::SolverSettings solver;
    LassoOptions lasso;
    bool standardize = false;
    bool run_cv_lasso = true;
    int threads = 1;
};

struct SimReport {
    Scenario scenario;
    MethodSummary proposed;
    MethodSummary cv_lasso;
    std::vector<ReplicationRecord> records; // by replication, proposed first
};

/// Runs every replication of a scenario. Per-replication seeds come from
/// derive_seed(base_seed, replication, purpose). Records are ordered by
/// replication index regardless of the thread count.
SimReport run_scenario(const Scenario &scenario, const SimSettings &settings);

/// The eight Table-1 style scenarios (n, p, sigma, mean function).
std::vector<Scenario> table1_preset(int replications, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Matrix scenarios.

struct MatrixScenario {
    Index l = 0;
    Index m = 0;
    Index rank = 0;
    double sigma = 0.0;
    int replications = 0;
    std::uint64_t seed = 0;
    /// Signal size expressed through the matrix rate
    /// s = ||M||_* (sqrt(l) + sqrt(m)) / (l m sigma); when sigma == 0 the
    /// nuclear norm is taken as target_s * sqrt(l m).
    double target_s = 0.5;

    void validate() const;
    double nuclear_norm() const;
};

struct MatrixRecord {
    int replication = 0;
    std::uint64_t signal_seed = 0;
    std::uint64_t noise_seed = 0;
    std::uint64_t estimator_seed = 0;
    double risk = 0.0;            // ||M_hat - M||_HS^2
    std::optional<double> normalized_risk; // / (l m sigma^2)
    double sigma_hat = 0.0;
    std::optional<double> sigma_rel_err_sq; // (sigma_hat / sigma - 1)^2
    double theta = 0.0;
    double residual_sq = 0.0;     // ||Y - M_hat||_HS^2
    double budget = 0.0;
    bool feasible = false;
};

struct MatrixSimReport {
    MatrixScenario scenario;
    double nuclear_norm = 0.0;
    double avg_risk = 0.0;
    std::optional<double> avg_normalized_risk;
    std::optional<double> avg_sigma_rel_err_sq;
    std::optional<estimators::RiskBound> bounds; // needs sigma > 0
    double elapsed_seconds = 0.0;
    std::vector<MatrixRecord> records;
};

/// Generates M = A B^T with Gaussian factors rescaled to the target nuclear
/// norm, adds N(0, sigma^2) noise and runs matrix_fit per replication.
MatrixSimReport run_matrix_scenario(const MatrixScenario &scenario);

/// Random orthogonal matrix (QR of a Gaussian matrix with sign fix).
Matrix random_orthogonal(Index n, std::uint64_t seed);

} // namespace tunefree::sim
