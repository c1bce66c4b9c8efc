#include "tunefree/random.hpp"
#include "tunefree/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tunefree::sim {

namespace {

inline double soft(double x, double t) {
    if (x > t)
        return x - t;
    if (x < -t)
        return x + t;
    return 0.0;
}

/// Coordinate-descent state for one (X, y) pair across a penalty sequence.
class CoordinateDescent {
public:
    CoordinateDescent(const Matrix &X, const Vector &y, const LassoOptions &opt)
        : X_(X), y_(y), opt_(opt), n_(static_cast<double>(X.rows())) {
        const Index p = X.cols();
        penalized_.assign(p, 1);
        for (Index j : opt.unpenalized) {
            if (j < 0 || j >= p)
                throw InputError("unpenalized column index out of range");
            penalized_[j] = 0;
        }
        curvature_ = (X.colwise().squaredNorm().transpose().array() / n_).matrix();
        beta_ = Vector::Zero(p);
        r_ = y;
        double centered = 0.0;
        if (!opt.unpenalized.empty() && y.size() > 0)
            centered = (y.array() - y.mean()).matrix().squaredNorm();
        else
            centered = y.squaredNorm();
        threshold_ = opt.tolerance * std::max(centered / n_, 1e-300);
    }

    void warm_start(const Vector &beta) {
        beta_ = beta;
        r_ = y_ - X_ * beta_;
    }

    const Vector &solve(double lambda) {
        const Index p = X_.cols();
        std::vector<Index> active;
        for (int sweep = 0; sweep < opt_.max_sweeps;) {
            // Full pass; it both updates and tells whether the active set is
            // complete.
            double delta = 0.0;
            for (Index j = 0; j < p; ++j)
                delta = std::max(delta, update(j, lambda));
            ++sweep;
            if (delta < threshold_)
                break;
            active.clear();
            for (Index j = 0; j < p; ++j)
                if (beta_[j] != 0.0 || !penalized_[j])
                    active.push_back(j);
            while (sweep < opt_.max_sweeps) {
                double inner = 0.0;
                for (Index j : active)
                    inner = std::max(inner, update(j, lambda));
                ++sweep;
                if (inner < threshold_)
                    break;
            }
        }
        return beta_;
    }

    const Vector &beta() const { return beta_; }

private:
    // Returns the curvature-weighted squared change.
    double update(Index j, double lambda) {
        const double v = curvature_[j];
        if (v <= 0.0)
            return 0.0;
        const double old = beta_[j];
        const double rho = X_.col(j).dot(r_) / n_ + v * old;
        const double fresh = penalized_[j] ? soft(rho, lambda) / v : rho / v;
        const double diff = fresh - old;
        if (diff == 0.0)
            return 0.0;
        beta_[j] = fresh;
        r_.noalias() -= diff * X_.col(j);
        return v * diff * diff;
    }

    const Matrix &X_;
    const Vector &y_;
    const LassoOptions &opt_;
    double n_;
    std::vector<char> penalized_;
    Vector curvature_;
    Vector beta_;
    Vector r_;
    double threshold_;
};

Matrix select_rows(const Matrix &X, const std::vector<Index> &rows) {
    Matrix out(static_cast<Index>(rows.size()), X.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.row(static_cast<Index>(i)) = X.row(rows[i]);
    return out;
}

Vector select_rows(const Vector &y, const std::vector<Index> &rows) {
    Vector out(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        out[static_cast<Index>(i)] = y[rows[i]];
    return out;
}

void check_options(const LassoOptions &opt) {
    if (opt.grid_size < 1)
        throw InputError("lasso grid needs at least one penalty");
    if (!(opt.min_ratio > 0.0) || opt.min_ratio > 1.0)
        throw InputError("lasso min_ratio must lie in (0, 1]");
    if (!(opt.tolerance > 0.0) || opt.max_sweeps < 1)
        throw InputError("lasso tolerance and max_sweeps must be positive");
}

} // namespace

double lambda_max(const Matrix &X, const Vector &y,
                  const std::vector<Index> &unpenalized) {
    if (X.rows() != y.size())
        throw InputError("lambda_max: X and y disagree in length");
    Vector r = y;
    if (!unpenalized.empty()) {
        Matrix U(X.rows(), static_cast<Index>(unpenalized.size()));
        for (std::size_t k = 0; k < unpenalized.size(); ++k)
            U.col(static_cast<Index>(k)) = X.col(unpenalized[k]);
        r -= U * U.colPivHouseholderQr().solve(y);
    }
    std::vector<char> pen(X.cols(), 1);
    for (Index j : unpenalized)
        pen[j] = 0;
    double best = 0.0;
    for (Index j = 0; j < X.cols(); ++j)
        if (pen[j])
            best = std::max(best, std::abs(X.col(j).dot(r)));
    return best / static_cast<double>(X.rows());
}

Vector lambda_grid(double top, int grid_size, double min_ratio) {
    Vector grid(grid_size);
    if (grid_size == 1) {
        grid[0] = top;
        return grid;
    }
    const double log_ratio = std::log(min_ratio);
    for (int i = 0; i < grid_size; ++i)
        grid[i] = top * std::exp(log_ratio * i / (grid_size - 1));
    return grid;
}

Vector lasso_fit(const Matrix &X, const Vector &y, double lambda,
                 const LassoOptions &options, const Vector *warm_start) {
    check_options(options);
    if (X.rows() != y.size())
        throw InputError("lasso_fit: X and y disagree in length");
    if (!(lambda >= 0.0))
        throw InputError("lasso_fit: penalty must be nonnegative");
    CoordinateDescent cd(X, y, options);
    if (warm_start)
        cd.warm_start(*warm_start);
    return cd.solve(lambda);
}

Matrix lasso_path(const Matrix &X, const Vector &y, const Vector &lambdas,
                  const LassoOptions &options) {
    check_options(options);
    if (X.rows() != y.size())
        throw InputError("lasso_path: X and y disagree in length");
    CoordinateDescent cd(X, y, options);
    Matrix out(X.cols(), lambdas.size());
    for (Index k = 0; k < lambdas.size(); ++k)
        out.col(k) = cd.solve(lambdas[k]);
    return out;
}

CvLassoResult cv_lasso(const Matrix &X, const Vector &y,
                       const LassoOptions &options, std::uint64_t seed) {
    check_options(options);
    const Index n = X.rows();
    if (y.size() != n)
        throw InputError("cv_lasso: X and y disagree in length");
    if (options.folds < 2 || n < options.folds)
        throw InputError("cv_lasso: need 2 <= folds <= n");

    CvLassoResult out;
    out.lambdas = lambda_grid(lambda_max(X, y, options.unpenalized),
                              options.grid_size, options.min_ratio);

    // Seeded Fisher-Yates shuffle; fold of row perm[i] is i mod folds.
    std::vector<Index> perm(n);
    std::iota(perm.begin(), perm.end(), Index{0});
    std::uint64_t state = seed;
    for (Index i = n - 1; i > 0; --i) {
        state = splitmix64(state);
        const auto j = static_cast<Index>(state % static_cast<std::uint64_t>(i + 1));
        std::swap(perm[i], perm[j]);
    }
    std::vector<int> fold_of(n);
    for (Index i = 0; i < n; ++i)
        fold_of[perm[i]] = static_cast<int>(i % options.folds);

    Vector sse = Vector::Zero(out.lambdas.size());
    for (int f = 0; f < options.folds; ++f) {
        std::vector<Index> train, test;
        for (Index i = 0; i < n; ++i)
            (fold_of[i] == f ? test : train).push_back(i);
        const Matrix Xtr = select_rows(X, train);
        const Vector ytr = select_rows(y, train);
        const Matrix Xte = select_rows(X, test);
        const Vector yte = select_rows(y, test);
        const Matrix path = lasso_path(Xtr, ytr, out.lambdas, options);
        for (Index k = 0; k < out.lambdas.size(); ++k)
            sse[k] += (yte - Xte * path.col(k)).squaredNorm();
    }
    out.cv_error = sse / static_cast<double>(n);
    out.cv_error.minCoeff(&out.lambda_index);
    out.lambda = out.lambdas[out.lambda_index];

    const Matrix full = lasso_path(X, y, out.lambdas.head(out.lambda_index + 1),
                                   options);
    out.beta = full.col(out.lambda_index);
    return out;
}

} // namespace tunefree::sim
