#include "tunefree/standardize.hpp"

#include <algorithm>
#include <cmath>

namespace tunefree {

Standardization standardize(const Matrix &X) {
    const Index n = X.rows();
    const Index p = X.cols();
    Standardization st;
    st.center = Vector::Zero(p);
    st.scale = Vector::Ones(p);
    st.constant.assign(p, 0);

    for (Index j = 0; j < p; ++j) {
        const auto col = X.col(j);
        const double lo = col.minCoeff();
        const double hi = col.maxCoeff();
        if (hi - lo <= 1e-12 * std::max({std::abs(lo), std::abs(hi), 1.0})) {
            st.constant[j] = 1;
            if (st.intercept < 0 && hi != 0.0)
                st.intercept = j;
        }
    }

    st.transformed = X;
    if (n == 0)
        return st;
    const bool center = st.intercept >= 0;
    for (Index j = 0; j < p; ++j) {
        if (st.constant[j])
            continue;
        auto col = st.transformed.col(j);
        if (center) {
            st.center[j] = col.mean();
            col.array() -= st.center[j];
        }
        const double rms = col.norm() / std::sqrt(static_cast<double>(n));
        if (rms > 0.0) {
            st.scale[j] = rms;
            col /= rms;
        }
    }
    return st;
}

Vector Standardization::to_original(const Vector &beta_std) const {
    if (beta_std.size() != scale.size())
        throw InputError("standardized coefficient vector has the wrong length");
    Vector beta = beta_std.cwiseQuotient(scale);
    if (intercept >= 0) {
        double shift = 0.0;
        for (Index j = 0; j < beta.size(); ++j)
            if (!constant[j])
                shift += center[j] * beta[j];
        const double level = transformed(0, intercept);
        beta[intercept] -= shift / level;
    }
    return beta;
}

} // namespace tunefree
