#include "tunefree/norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace tunefree::norms {

namespace {

void check_dim(const NormKind &kind, const Vector &x) {
    if (auto n = kind.ambient_dim(); n && *n != x.size())
        throw InputError(kind.name() + " norm expects length " +
                         std::to_string(*n) + ", got " +
                         std::to_string(x.size()));
}

Vector singular_values(const NormKind &kind, const Vector &x) {
    const Matrix M = as_matrix(x, kind.rows(), kind.cols());
    if (M.size() == 0)
        return Vector(0);
    Eigen::BDCSVD<Matrix> dec(M);
    if (dec.info() != Eigen::Success)
        throw SolverError("SVD did not converge", kind.name() + " norm");
    return dec.singularValues();
}

} // namespace

NormKind NormKind::nuclear(Index rows, Index cols) {
    if (rows < 1 || cols < 1)
        throw InputError("nuclear norm needs positive matrix dimensions");
    NormKind k(NormTag::Nuclear);
    k.rows_ = rows;
    k.cols_ = cols;
    return k;
}

NormKind NormKind::spectral(Index rows, Index cols) {
    if (rows < 1 || cols < 1)
        throw InputError("spectral norm needs positive matrix dimensions");
    NormKind k(NormTag::Spectral);
    k.rows_ = rows;
    k.cols_ = cols;
    return k;
}

NormKind NormKind::design(Matrix A) {
    if (A.rows() < 1 || A.cols() < A.rows())
        throw InputError("design norm needs an n x p matrix with p >= n >= 1");
    const Vector zero = Vector::Zero(A.rows());
    const auto proj = solvers::column_space_projection(A, zero);
    if (proj.rank < A.rows())
        throw InputError("design norm requires full row rank; rank " +
                         std::to_string(proj.rank) + " < " +
                         std::to_string(A.rows()));
    NormKind k(NormTag::Design);
    k.rows_ = A.rows();
    k.cols_ = A.cols();
    k.design_ = std::make_shared<const Matrix>(std::move(A));
    return k;
}

const Matrix &NormKind::design_matrix() const {
    if (!design_)
        throw InputError(name() + " norm has no design matrix");
    return *design_;
}

std::optional<Index> NormKind::ambient_dim() const {
    switch (tag_) {
    case NormTag::Nuclear:
    case NormTag::Spectral:
        return rows_ * cols_;
    case NormTag::Design:
        return rows_;
    default:
        return std::nullopt;
    }
}

std::string NormKind::name() const {
    switch (tag_) {
    case NormTag::L1: return "l1";
    case NormTag::L2: return "l2";
    case NormTag::Sup: return "sup";
    case NormTag::Nuclear: return "nuclear";
    case NormTag::Spectral: return "spectral";
    case NormTag::Design: return "design";
    }
    return "unknown";
}

NormKind dual_kind(const NormKind &kind) {
    switch (kind.tag()) {
    case NormTag::L1: return NormKind::sup();
    case NormTag::Sup: return NormKind::l1();
    case NormTag::L2: return NormKind::l2();
    case NormTag::Nuclear: return NormKind::spectral(kind.rows(), kind.cols());
    case NormTag::Spectral: return NormKind::nuclear(kind.rows(), kind.cols());
    case NormTag::Design: break;
    }
    throw InputError("the design norm's dual has no closed-form kind");
}

double norm_eval(const NormKind &kind, const Vector &x,
                 const solvers::SolverSettings &settings) {
    check_dim(kind, x);
    switch (kind.tag()) {
    case NormTag::L1: return x.lpNorm<1>();
    case NormTag::L2: return x.norm();
    case NormTag::Sup: return x.size() ? x.lpNorm<Eigen::Infinity>() : 0.0;
    case NormTag::Nuclear: return singular_values(kind, x).sum();
    case NormTag::Spectral: {
        const Vector s = singular_values(kind, x);
        return s.size() ? s[0] : 0.0;
    }
    case NormTag::Design:
        return solvers::basis_pursuit(kind.design_matrix(), x, settings)
            .objective;
    }
    return 0.0;
}

double dual_norm_eval(const NormKind &kind, const Vector &x) {
    check_dim(kind, x);
    if (kind.tag() == NormTag::Design) {
        // The unit ball is conv{+-A_j}, so the support function is a column max.
        return (kind.design_matrix().transpose() * x)
            .cwiseAbs()
            .maxCoeff();
    }
    return norm_eval(dual_kind(kind), x);
}

Vector project_l1_ball(const Vector &x, double radius) {
    if (!(radius >= 0.0))
        throw InputError("projection radius must be nonnegative");
    if (x.lpNorm<1>() <= radius)
        return x;
    if (radius == 0.0)
        return Vector::Zero(x.size());

    std::vector<double> mags(x.size());
    for (Index i = 0; i < x.size(); ++i)
        mags[i] = std::abs(x[i]);
    std::sort(mags.begin(), mags.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t k = 0; k < mags.size(); ++k) {
        cumulative += mags[k];
        const double t = (cumulative - radius) / static_cast<double>(k + 1);
        if (k + 1 == mags.size() || mags[k + 1] <= t) {
            theta = t;
            break;
        }
    }
    Vector out(x.size());
    for (Index i = 0; i < x.size(); ++i) {
        const double m = std::max(std::abs(x[i]) - theta, 0.0);
        out[i] = x[i] < 0 ? -m : m;
    }
    return out;
}

Vector project_ball(const NormKind &kind, const Vector &x, double radius) {
    check_dim(kind, x);
    if (!(radius >= 0.0))
        throw InputError("projection radius must be nonnegative");
    switch (kind.tag()) {
    case NormTag::L1:
        return project_l1_ball(x, radius);
    case NormTag::L2: {
        const double nrm = x.norm();
        return nrm <= radius ? Vector(x) : Vector(x * (radius / nrm));
    }
    case NormTag::Nuclear: {
        const auto dec = solvers::svd(as_matrix(x, kind.rows(), kind.cols()));
        const Vector s = project_l1_ball(dec.s, radius);
        return as_vector(dec.U * s.asDiagonal() * dec.V.transpose());
    }
    default:
        throw InputError("project_ball is not implemented for the " +
                         kind.name() + " norm");
    }
}

void NormPair::validate() const {
    const auto a = K.ambient_dim();
    const auto b = Ktilde.ambient_dim();
    if (a && b && *a != *b)
        throw InputError("norm pair acts on different dimensions (" +
                         std::to_string(*a) + " vs " + std::to_string(*b) + ")");
}

} // namespace tunefree::norms
