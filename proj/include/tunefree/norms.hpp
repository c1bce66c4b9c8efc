#pragma once

#include "tunefree/solvers.hpp"
#include "tunefree/types.hpp"

#include <memory>
#include <optional>
#include <string>

namespace tunefree::norms {

enum class NormTag { L1, L2, Sup, Nuclear, Spectral, Design };

/// One of the six supported norms on R^n. Nuclear and spectral norms act on
/// column-major flattened l x m matrices; the design norm is
/// K(x) = min{ |beta|_1 : x = A beta } for a full row rank A.
class NormKind {
public:
    static NormKind l1() { return NormKind(NormTag::L1); }
    static NormKind l2() { return NormKind(NormTag::L2); }
    static NormKind sup() { return NormKind(NormTag::Sup); }
    static NormKind nuclear(Index rows, Index cols);
    static NormKind spectral(Index rows, Index cols);
    /// Throws InputError if A does not have full row rank.
    static NormKind design(Matrix A);

    NormTag tag() const { return tag_; }
    Index rows() const { return rows_; }
    Index cols() const { return cols_; }
    const Matrix &design_matrix() const;

    /// Required vector length, or nullopt for the coordinate norms.
    std::optional<Index> ambient_dim() const;

    std::string name() const;

private:
    explicit NormKind(NormTag tag) : tag_(tag) {}

    NormTag tag_;
    Index rows_ = 0;
    Index cols_ = 0;
    std::shared_ptr<const Matrix> design_;
};

/// The closed-form dual kind (L1 <-> Sup, L2 <-> L2, Nuclear <-> Spectral).
/// The design norm has no kind for its dual; throws InputError.
NormKind dual_kind(const NormKind &kind);

double norm_eval(const NormKind &kind, const Vector &x,
                 const solvers::SolverSettings &settings = {});

double dual_norm_eval(const NormKind &kind, const Vector &x);

/// Euclidean projection onto { v : K(v) <= radius } for L1, L2 and Nuclear.
Vector project_ball(const NormKind &kind, const Vector &x, double radius);

/// Euclidean projection of a vector onto the l1 ball (sort-based soft
/// threshold).
Vector project_l1_ball(const Vector &x, double radius);

struct NormPair {
    NormKind K;      // estimation norm
    NormKind Ktilde; // noise-level norm

    /// Throws InputError if the two norms fix different ambient dimensions.
    void validate() const;
};

} // namespace tunefree::norms
