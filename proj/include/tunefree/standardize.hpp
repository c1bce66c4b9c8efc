#pragma once

#include "tunefree/types.hpp"

#include <vector>

namespace tunefree {

/// Column standardization of a design matrix. Non-constant columns are
/// centered and scaled to unit variance (||x_j||^2 = n); constant columns
/// (intercepts) are kept as they are. Centering is applied only when a
/// nonzero constant column is present to absorb the shift, so fitted values
/// are unchanged by the back transform.
struct Standardization {
    Matrix transformed;
    Vector center;
    Vector scale;
    std::vector<char> constant;
    Index intercept = -1; // first nonzero constant column, or -1

    /// Coefficients on the original columns giving the same fitted values.
    Vector to_original(const Vector &beta_std) const;
};

Standardization standardize(const Matrix &X);

} // namespace tunefree
