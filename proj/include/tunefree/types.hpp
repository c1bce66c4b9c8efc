#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace tunefree {

// Column-major dense storage; matrices are flattened column by column when a
// vector view is needed.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Invalid caller input: shape mismatch, negative radius, malformed data.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical kernel failed to reach its stopping criterion.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string &what, std::string step = {})
        : std::runtime_error(step.empty() ? what : step + ": " + what),
          step_(std::move(step)) {}

    SolverError(const SolverError &other, std::string step)
        : SolverError(other.detail(), std::move(step)) {}

    const std::string &step() const noexcept { return step_; }

    std::string detail() const {
        std::string w = what();
        if (!step_.empty() && w.rfind(step_ + ": ", 0) == 0)
            return w.substr(step_.size() + 2);
        return w;
    }

private:
    std::string step_;
};

/// Reshape a column-major flattened vector into an l x m matrix.
inline Matrix as_matrix(const Vector &x, Index rows, Index cols) {
    if (x.size() != rows * cols)
        throw InputError("vector length " + std::to_string(x.size()) +
                         " does not match " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    return Eigen::Map<const Matrix>(x.data(), rows, cols);
}

inline Vector as_vector(const Matrix &m) {
    return Eigen::Map<const Vector>(m.data(), m.size());
}

} // namespace tunefree
