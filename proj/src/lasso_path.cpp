#include "lasso_path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tunefree::solvers::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative pivot below which a column is treated as lying in the active span.
constexpr double kDependentPivot = 1e-10;
// Drift control: recompute beta, residual and correlations from the factor.
constexpr int kResyncEvery = 32;

} // namespace

LassoPath::LassoPath(const Matrix &A, const Vector &y)
    : A_(A), y_(y), n_(A.rows()), q_(A.cols()) {
    const Index cap = std::min(n_, q_);
    R_ = Matrix::Zero(cap, cap);
    is_active_.assign(q_, 0);
    blocked_.assign(q_, 0);
    col_norm2_ = A_.colwise().squaredNorm().transpose();
    r_ = y_;
    c_ = A_.transpose() * y_;
    sign_.resize(0);
    beta_active_.resize(0);
    last_direction_ = Vector::Zero(n_);
    lambda_ = q_ > 0 ? c_.cwiseAbs().maxCoeff() : 0.0;
}

Vector LassoPath::solve_gram(const Vector &rhs) const {
    auto R = R_.topLeftCorner(m_, m_);
    Vector z = R.transpose().triangularView<Eigen::Lower>().solve(rhs);
    return R.triangularView<Eigen::Upper>().solve(z);
}

Vector LassoPath::active_combination(const Vector &w) const {
    Vector u = Vector::Zero(n_);
    for (Index k = 0; k < m_; ++k)
        u.noalias() += w[k] * A_.col(active_[k]);
    return u;
}

void LassoPath::add(Index j, double sign) {
    Vector g(m_);
    for (Index k = 0; k < m_; ++k)
        g[k] = A_.col(active_[k]).dot(A_.col(j));
    Vector z = m_ > 0 ? Vector(R_.topLeftCorner(m_, m_)
                                   .transpose()
                                   .triangularView<Eigen::Lower>()
                                   .solve(g))
                      : Vector();
    const double d = col_norm2_[j] - z.squaredNorm();
    if (m_ == R_.rows() || d <= kDependentPivot * col_norm2_[j]) {
        blocked_[j] = 1;
        return;
    }
    R_.col(m_).head(m_) = z;
    R_(m_, m_) = std::sqrt(d);
    active_.push_back(j);
    is_active_[j] = 1;
    sign_.conservativeResize(m_ + 1);
    sign_[m_] = sign;
    beta_active_.conservativeResize(m_ + 1);
    beta_active_[m_] = 0.0;
    ++m_;
}

void LassoPath::remove(Index k) {
    // Drop column k of R, then restore triangularity with Givens rotations on
    // the rows it leaves upper Hessenberg.
    for (Index j = k; j + 1 < m_; ++j)
        R_.col(j).head(m_) = R_.col(j + 1).head(m_);
    for (Index j = k; j + 1 < m_; ++j) {
        const double a = R_(j, j);
        const double b = R_(j + 1, j);
        const double h = std::hypot(a, b);
        if (h == 0.0)
            continue;
        const double c = a / h;
        const double s = b / h;
        for (Index col = j; col + 1 < m_; ++col) {
            const double x = R_(j, col);
            const double z = R_(j + 1, col);
            R_(j, col) = c * x + s * z;
            R_(j + 1, col) = -s * x + c * z;
        }
        R_(j + 1, j) = 0.0;
    }
    R_.row(m_ - 1).head(m_).setZero();
    R_.col(m_ - 1).head(m_).setZero();

    is_active_[active_[k]] = 0;
    active_.erase(active_.begin() + k);
    for (Index i = k; i + 1 < m_; ++i) {
        sign_[i] = sign_[i + 1];
        beta_active_[i] = beta_active_[i + 1];
    }
    --m_;
    sign_.conservativeResize(m_);
    beta_active_.conservativeResize(m_);
    std::fill(blocked_.begin(), blocked_.end(), 0);
}

void LassoPath::resync() {
    if (m_ == 0) {
        r_ = y_;
    } else {
        Vector rhs(m_);
        for (Index k = 0; k < m_; ++k)
            rhs[k] = A_.col(active_[k]).dot(y_) - lambda_ * sign_[k];
        beta_active_ = solve_gram(rhs);
        r_ = y_ - active_combination(beta_active_);
    }
    c_.noalias() = A_.transpose() * r_;
}

LassoPath::Stop LassoPath::run(double budget, int max_steps) {
    const bool use_budget = budget >= 0.0;
    if (lambda_ <= 0.0 || (use_budget && r_.squaredNorm() <= budget))
        return Stop::Trivial;

    {
        Index first = 0;
        c_.cwiseAbs().maxCoeff(&first);
        add(first, c_[first] > 0 ? 1.0 : -1.0);
    }

    // A column that just left may not re-enter with its old sign at t = 0,
    // but may still join with the opposite sign.
    Index just_dropped = -1;
    double dropped_sign = 0.0;
    while (true) {
        if (steps_ >= max_steps)
            throw SolverError("Lasso path did not finish within " +
                              std::to_string(max_steps) +
                              " breakpoints (lambda = " +
                              std::to_string(lambda_) + ", active = " +
                              std::to_string(m_) + ")");
        ++steps_;

        const Vector w = solve_gram(sign_);
        const Vector u = active_combination(w);
        const Vector a = A_.transpose() * u;
        last_direction_ = u;

        double step = lambda_;
        enum class Event { End, Join, Drop, Budget } event = Event::End;
        Index which = -1;
        double join_sign = 0.0;

        for (Index j = 0; j < q_; ++j) {
            if (is_active_[j] || blocked_[j])
                continue;
            const bool skip_plus = j == just_dropped && dropped_sign > 0.0;
            const bool skip_minus = j == just_dropped && dropped_sign < 0.0;
            if (!skip_plus && a[j] < 1.0 - 1e-12) {
                const double t = std::max(0.0, (lambda_ - c_[j]) / (1.0 - a[j]));
                if (t < step) {
                    step = t;
                    event = Event::Join;
                    which = j;
                    join_sign = 1.0;
                }
            }
            if (!skip_minus && a[j] > -1.0 + 1e-12) {
                const double t = std::max(0.0, (lambda_ + c_[j]) / (1.0 + a[j]));
                if (t < step) {
                    step = t;
                    event = Event::Join;
                    which = j;
                    join_sign = -1.0;
                }
            }
        }
        // A coefficient leaves when the direction drives it against its sign.
        // Deciding by sign_ rather than by the sign of beta keeps round-off
        // from dropping a fresh entrant whose resynced value is ~0.
        for (Index k = 0; k < m_; ++k) {
            if (sign_[k] * w[k] < 0.0) {
                const double t = std::max(0.0, sign_[k] * beta_active_[k]) / std::abs(w[k]);
                if (t < step) {
                    step = t;
                    event = Event::Drop;
                    which = k;
                }
            }
        }
        if (use_budget) {
            // ||r - t u||^2 = budget on [0, step]; the quadratic decreases on
            // [0, lambda] because r.u = lambda * s^T G^{-1} s = lambda ||u||^2.
            const double rr = r_.squaredNorm();
            const double ru = r_.dot(u);
            const double uu = u.squaredNorm();
            const double at_step = rr - 2.0 * step * ru + step * step * uu;
            if (at_step <= budget) {
                const double disc = std::max(0.0, ru * ru - uu * (rr - budget));
                const double t = (rr - budget) / (ru + std::sqrt(disc));
                step = std::clamp(t, 0.0, step);
                event = Event::Budget;
            }
        }

        beta_active_ += step * w;
        r_ -= step * u;
        c_ -= step * a;
        lambda_ = std::max(0.0, lambda_ - step);
        just_dropped = -1;
        dropped_sign = 0.0;

        switch (event) {
        case Event::End:
            lambda_ = 0.0;
            resync();
            return Stop::PenaltyZero;
        case Event::Budget:
            resync();
            return Stop::Budget;
        case Event::Join:
            add(which, join_sign);
            break;
        case Event::Drop:
            just_dropped = active_[which];
            dropped_sign = sign_[which];
            beta_active_[which] = 0.0;
            remove(which);
            break;
        }
        if (steps_ % kResyncEvery == 0)
            resync();
    }
}

Vector LassoPath::beta() const {
    Vector b = Vector::Zero(q_);
    for (Index k = 0; k < m_; ++k)
        b[active_[k]] = beta_active_[k];
    return b;
}

Vector LassoPath::certificate() const {
    if (m_ == 0)
        return Vector::Zero(n_);
    return active_combination(solve_gram(sign_));
}

} // namespace tunefree::solvers::detail
