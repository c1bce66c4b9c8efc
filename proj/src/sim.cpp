#include "tunefree/sim.hpp"

#include "tunefree/random.hpp"
#include "tunefree/standardize.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <thread>

namespace tunefree::sim {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t seed_for(std::uint64_t base, int rep, SeedPurpose purpose) {
    return derive_seed(base, static_cast<std::uint64_t>(rep),
                       static_cast<std::uint64_t>(purpose));
}

/// Runs body(i) for i in [0, count) on up to `threads` workers. Results are
/// written by index, so the output does not depend on scheduling.
void parallel_for(int count, int threads, const std::function<void(int)> &body) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (int i = next++; i < count; i = next++)
                    body(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto &th : pool)
        th.join();
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
}

MethodSummary summarize(Method method, const std::vector<ReplicationRecord> &records,
                        bool normalized) {
    MethodSummary s;
    s.method = method;
    double norm_sum = 0.0;
    for (const auto &r : records) {
        if (r.method != method)
            continue;
        s.elapsed_seconds += r.seconds;
        if (!r.ok) {
            ++s.failures;
            continue;
        }
        ++s.successes;
        s.avg_true_positives += r.true_positives;
        s.avg_false_positives += r.false_positives;
        s.avg_prediction_error += r.prediction_error;
        if (r.normalized_prediction_error)
            norm_sum += *r.normalized_prediction_error;
    }
    if (s.successes > 0) {
        const double k = s.successes;
        s.avg_true_positives /= k;
        s.avg_false_positives /= k;
        s.avg_prediction_error /= k;
        if (normalized)
            s.avg_normalized_prediction_error = norm_sum / k;
    }
    return s;
}

} // namespace

Matrix gen_design(Index n, Index p, std::uint64_t seed) {
    if (n < 1 || p < 1)
        throw InputError("gen_design: n and p must be positive");
    GaussianSampler sampler(seed, static_cast<std::uint64_t>(SeedPurpose::Design));
    Matrix X(n, p + 1);
    X.col(0).setOnes();
    X.rightCols(p) = sampler.normal_matrix(n, p);
    return X;
}

Vector gen_response(const Matrix &X, const Vector &beta0, double sigma,
                    std::uint64_t seed) {
    if (X.cols() != beta0.size())
        throw InputError("gen_response: beta0 length does not match design");
    if (!(sigma >= 0.0))
        throw InputError("gen_response: sigma must be nonnegative");
    GaussianSampler sampler(seed, static_cast<std::uint64_t>(SeedPurpose::Noise));
    const Vector noise = sampler.normal_vector(X.rows());
    Vector Y = X * beta0;
    if (sigma > 0.0)
        Y += sigma * noise;
    return Y;
}

double prediction_error(const Matrix &X, const Vector &beta_hat,
                        const Vector &beta0) {
    if (X.cols() != beta_hat.size() || X.cols() != beta0.size())
        throw InputError("prediction_error: coefficient length mismatch");
    return (X * (beta_hat - beta0)).squaredNorm() / static_cast<double>(X.rows());
}

Selection selection_metrics(const Vector &beta_hat, const Vector &beta0,
                            double threshold, const std::vector<Index> &excluded) {
    if (beta_hat.size() != beta0.size())
        throw InputError("selection_metrics: length mismatch");
    Selection out;
    for (Index j = 0; j < beta_hat.size(); ++j) {
        if (std::find(excluded.begin(), excluded.end(), j) != excluded.end())
            continue;
        if (std::abs(beta_hat[j]) <= threshold)
            continue;
        if (beta0[j] != 0.0)
            ++out.true_positives;
        else
            ++out.false_positives;
    }
    return out;
}

void Scenario::validate() const {
    if (n < 1 || p < 1)
        throw InputError("scenario: n and p must be at least 1");
    if (replications < 1)
        throw InputError("scenario: replications must be at least 1");
    if (!(sigma >= 0.0))
        throw InputError("scenario: sigma must be nonnegative");
    for (const auto &[idx, val] : beta0) {
        (void)val;
        if (idx < 1 || idx > p)
            throw InputError("scenario: beta0 index " + std::to_string(idx) +
                             " outside [1, " + std::to_string(p) + "]");
    }
}

Vector Scenario::beta0_vector() const {
    Vector b = Vector::Zero(p + 1);
    for (const auto &[idx, val] : beta0)
        b[idx] += val;
    return b;
}

std::string Scenario::formula() const {
    std::ostringstream os;
    bool first = true;
    for (const auto &[idx, val] : beta0) {
        if (val == 0.0)
            continue;
        if (val < 0.0)
            os << '-';
        else if (!first)
            os << '+';
        const double mag = std::abs(val);
        if (mag != 1.0)
            os << mag;
        os << 'x' << idx;
        first = false;
    }
    return first ? "0" : os.str();
}

const char *method_name(Method m) {
    return m == Method::Proposed ? "proposed" : "cv_lasso";
}

SimReport run_scenario(const Scenario &scenario, const SimSettings &settings) {
    scenario.validate();
    settings.solver.validate();
    const Vector beta0 = scenario.beta0_vector();
    const int reps = scenario.replications;
    const bool normalized = scenario.sigma > 0.0;
    const double sigma_sq = scenario.sigma * scenario.sigma;

    LassoOptions lasso = settings.lasso;
    if (std::find(lasso.unpenalized.begin(), lasso.unpenalized.end(), 0) ==
        lasso.unpenalized.end())
        lasso.unpenalized.push_back(0);

    std::vector<ReplicationRecord> proposed(reps), baseline(reps);
    parallel_for(reps, settings.threads, [&](int rep) {
        const auto design_seed = seed_for(scenario.base_seed, rep, SeedPurpose::Design);
        const auto noise_seed = seed_for(scenario.base_seed, rep, SeedPurpose::Noise);
        const Matrix X = gen_design(scenario.n, scenario.p, design_seed);
        const Vector Y = gen_response(X, beta0, scenario.sigma, noise_seed);

        auto fill = [&](ReplicationRecord &rec, const Vector &beta_hat) {
            const auto sel = selection_metrics(
                beta_hat, beta0, estimators::support_threshold(beta_hat));
            rec.true_positives = sel.true_positives;
            rec.false_positives = sel.false_positives;
            rec.prediction_error = prediction_error(X, beta_hat, beta0);
            if (normalized)
                rec.normalized_prediction_error = rec.prediction_error / sigma_sq;
            rec.ok = true;
        };

        ReplicationRecord &pr = proposed[rep];
        pr.replication = rep;
        pr.method = Method::Proposed;
        pr.design_seed = design_seed;
        pr.noise_seed = noise_seed;
        pr.method_seed = seed_for(scenario.base_seed, rep, SeedPurpose::Estimator);
        auto start = Clock::now();
        try {
            GaussianSampler sampler(pr.method_seed);
            Vector beta_hat;
            estimators::RegressionFit fit;
            if (settings.standardize) {
                const auto st = standardize(X);
                fit = estimators::regression_fit(st.transformed, Y, sampler,
                                                 settings.solver);
                beta_hat = st.to_original(fit.beta_hat);
            } else {
                fit = estimators::regression_fit(X, Y, sampler, settings.solver);
                beta_hat = fit.beta_hat;
            }
            pr.sigma_hat = fit.sigma_hat;
            pr.m1 = fit.m1;
            pr.m2 = fit.m2;
            pr.gamma = fit.gamma;
            pr.rank_k = fit.rank_k;
            pr.residual_sq = fit.residual_sq;
            pr.budget = fit.budget;
            fill(pr, beta_hat);
        } catch (const std::exception &e) {
            pr.ok = false;
            pr.error = e.what();
        }
        pr.seconds = seconds_since(start);

        ReplicationRecord &cr = baseline[rep];
        cr.replication = rep;
        cr.method = Method::CvLasso;
        cr.design_seed = design_seed;
        cr.noise_seed = noise_seed;
        cr.method_seed = seed_for(scenario.base_seed, rep, SeedPurpose::CrossValidation);
        if (!settings.run_cv_lasso) {
            cr.error = "skipped";
            return;
        }
        start = Clock::now();
        try {
            const auto cv = cv_lasso(X, Y, lasso, cr.method_seed);
            cr.lambda = cv.lambda;
            fill(cr, cv.beta);
        } catch (const std::exception &e) {
            cr.ok = false;
            cr.error = e.what();
        }
        cr.seconds = seconds_since(start);
    });

    SimReport report;
    report.scenario = scenario;
    report.records.reserve(2 * reps);
    for (int rep = 0; rep < reps; ++rep) {
        report.records.push_back(proposed[rep]);
        if (settings.run_cv_lasso)
            report.records.push_back(baseline[rep]);
    }
    report.proposed = summarize(Method::Proposed, report.records, normalized);
    report.cv_lasso = summarize(Method::CvLasso, report.records, normalized);
    return report;
}

std::vector<Scenario> table1_preset(int replications, std::uint64_t seed) {
    struct Row {
        Index n, p;
        double sigma;
        std::vector<std::pair<Index, double>> beta0;
    };
    const std::vector<Row> rows = {
        {100, 1000, 2.0, {{1, 1.0}, {2, 1.0}}},
        {100, 1000, 3.0, {{1, 1.0}, {2, 1.0}}},
        {200, 1000, 2.0, {{1, 1.0}, {2, 1.0}, {3, -1.0}}},
        {200, 1000, 3.0, {{1, 1.0}, {2, 1.0}, {3, -1.0}}},
        {300, 300, 2.0, {{1, 1.0}, {2, 2.0}}},
        {300, 300, 3.0, {{1, 1.0}, {2, 2.0}}},
        {400, 4000, 2.0, {{1, 1.0}, {2, 1.0}, {3, 1.0}, {4, 1.0}}},
        {400, 4000, 3.0, {{1, 1.0}, {2, 1.0}, {3, 1.0}, {4, 1.0}}},
    };
    std::vector<Scenario> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        Scenario s;
        s.label = "table1-row" + std::to_string(i + 1);
        s.n = rows[i].n;
        s.p = rows[i].p;
        s.sigma = rows[i].sigma;
        s.beta0 = rows[i].beta0;
        s.replications = replications;
        s.base_seed = derive_seed(seed, i + 1, 0);
        out.push_back(std::move(s));
    }
    return out;
}

void MatrixScenario::validate() const {
    if (l < 1 || m < 1)
        throw InputError("matrix scenario: l and m must be at least 1");
    if (rank < 0 || rank > std::min(l, m))
        throw InputError("matrix scenario: rank must lie in [0, min(l, m)]");
    if (!(sigma >= 0.0))
        throw InputError("matrix scenario: sigma must be nonnegative");
    if (replications < 1)
        throw InputError("matrix scenario: replications must be at least 1");
    if (!(target_s >= 0.0))
        throw InputError("matrix scenario: target_s must be nonnegative");
}

double MatrixScenario::nuclear_norm() const {
    if (rank == 0)
        return 0.0;
    const double ld = static_cast<double>(l);
    const double md = static_cast<double>(m);
    if (sigma > 0.0)
        return target_s * ld * md * sigma / (std::sqrt(ld) + std::sqrt(md));
    return target_s * std::sqrt(ld * md);
}

Matrix random_orthogonal(Index n, std::uint64_t seed) {
    GaussianSampler sampler(seed, 0x0a7);
    const Matrix G = sampler.normal_matrix(n, n);
    Eigen::HouseholderQR<Matrix> qr(G);
    Matrix Q = qr.householderQ();
    const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j)
        if (R(j, j) < 0.0)
            Q.col(j) = -Q.col(j);
    return Q;
}

MatrixSimReport run_matrix_scenario(const MatrixScenario &scenario) {
    scenario.validate();
    const auto start = Clock::now();
    MatrixSimReport report;
    report.scenario = scenario;
    report.nuclear_norm = scenario.nuclear_norm();
    const double lm = static_cast<double>(scenario.l * scenario.m);
    const bool normalized = scenario.sigma > 0.0;
    double norm_risk_sum = 0.0;
    double sigma_err_sum = 0.0;

    for (int rep = 0; rep < scenario.replications; ++rep) {
        MatrixRecord rec;
        rec.replication = rep;
        rec.signal_seed = seed_for(scenario.seed, rep, SeedPurpose::MatrixSignal);
        rec.noise_seed = seed_for(scenario.seed, rep, SeedPurpose::MatrixNoise);
        rec.estimator_seed = seed_for(scenario.seed, rep, SeedPurpose::MatrixEstimator);

        Matrix M = Matrix::Zero(scenario.l, scenario.m);
        if (scenario.rank > 0) {
            GaussianSampler sig(rec.signal_seed, 1);
            const Matrix A = sig.normal_matrix(scenario.l, scenario.rank);
            const Matrix B = sig.normal_matrix(scenario.m, scenario.rank);
            M = A * B.transpose();
            const double nuc = solvers::svd(M).s.sum();
            if (nuc > 0.0)
                M *= report.nuclear_norm / nuc;
        }
        GaussianSampler noise(rec.noise_seed, 2);
        Matrix Y = M;
        if (scenario.sigma > 0.0)
            Y += scenario.sigma * noise.normal_matrix(scenario.l, scenario.m);

        const auto fit = estimators::matrix_fit(Y, GaussianSampler(rec.estimator_seed));
        rec.risk = (fit.m_hat - M).squaredNorm();
        rec.sigma_hat = fit.sigma_hat;
        rec.theta = fit.theta;
        rec.residual_sq = (Y - fit.m_hat).squaredNorm();
        rec.budget = fit.budget;
        rec.feasible = rec.residual_sq <= fit.budget * (1.0 + 1e-4) + 1e-12;
        if (normalized) {
            rec.normalized_risk = rec.risk / (lm * scenario.sigma * scenario.sigma);
            const double rel = fit.sigma_hat / scenario.sigma - 1.0;
            rec.sigma_rel_err_sq = rel * rel;
            norm_risk_sum += *rec.normalized_risk;
            sigma_err_sum += *rec.sigma_rel_err_sq;
        }
        report.avg_risk += rec.risk;
        report.records.push_back(rec);
    }
    const double reps = scenario.replications;
    report.avg_risk /= reps;
    if (normalized) {
        report.avg_normalized_risk = norm_risk_sum / reps;
        report.avg_sigma_rel_err_sq = sigma_err_sum / reps;
        report.bounds = estimators::matrix_risk_bounds(
            {scenario.l, scenario.m, scenario.sigma, report.nuclear_norm}, 200,
            scenario.seed);
    }
    report.elapsed_seconds = seconds_since(start);
    return report;
}

} // namespace tunefree::sim
