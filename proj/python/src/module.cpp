#include "tunefree/estimators.hpp"
#include "tunefree/norms.hpp"
#include "tunefree/random.hpp"
#include "tunefree/sim.hpp"
#include "tunefree/solvers.hpp"
#include "tunefree/types.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

namespace py = pybind11;
using namespace tunefree;
using namespace tunefree::sim;

namespace {

norms::NormKind kind_from_name(const std::string &name, Index rows, Index cols) {
    if (name == "l1")
        return norms::NormKind::l1();
    if (name == "l2")
        return norms::NormKind::l2();
    if (name == "sup")
        return norms::NormKind::sup();
    if (name == "nuclear")
        return norms::NormKind::nuclear(rows, cols);
    if (name == "spectral")
        return norms::NormKind::spectral(rows, cols);
    throw InputError("unknown norm '" + name +
                     "' (expected l1, l2, sup, nuclear or spectral)");
}

solvers::SolverSettings settings_from(int max_iterations, double tol) {
    solvers::SolverSettings s;
    s.max_iterations = max_iterations;
    s.primal_tolerance = tol;
    s.dual_tolerance = tol;
    s.validate();
    return s;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Tuning-free regression and matrix denoising";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    m.def(
        "norm",
        [](const Vector &x, const std::string &kind, Index rows, Index cols) {
            return norms::norm_eval(kind_from_name(kind, rows, cols), x);
        },
        py::arg("x"), py::arg("kind"), py::arg("rows") = 0, py::arg("cols") = 0,
        "Norm of x; matrix norms read x column-major as rows x cols.");
    m.def(
        "dual_norm",
        [](const Vector &x, const std::string &kind, Index rows, Index cols) {
            return norms::dual_norm_eval(kind_from_name(kind, rows, cols), x);
        },
        py::arg("x"), py::arg("kind"), py::arg("rows") = 0, py::arg("cols") = 0);
    m.def(
        "design_norm",
        [](const Matrix &A, const Vector &x) {
            return norms::norm_eval(norms::NormKind::design(A), x);
        },
        py::arg("A"), py::arg("x"), "min |b|_1 subject to A b = x.");
    m.def(
        "project_ball",
        [](const Vector &x, const std::string &kind, double radius, Index rows,
           Index cols) {
            return norms::project_ball(kind_from_name(kind, rows, cols), x, radius);
        },
        py::arg("x"), py::arg("kind"), py::arg("radius"), py::arg("rows") = 0,
        py::arg("cols") = 0);

    py::class_<solvers::BasisPursuitResult>(m, "BasisPursuitResult")
        .def_readonly("beta", &solvers::BasisPursuitResult::beta)
        .def_readonly("objective", &solvers::BasisPursuitResult::objective)
        .def_readonly("dual_certificate", &solvers::BasisPursuitResult::dual_certificate)
        .def_readonly("iterations", &solvers::BasisPursuitResult::iterations);
    m.def(
        "basis_pursuit",
        [](const Matrix &A, const Vector &y, int max_iterations, double tol) {
            return solvers::basis_pursuit(A, y, settings_from(max_iterations, tol));
        },
        py::arg("A"), py::arg("y"), py::arg("max_iterations") = 50000,
        py::arg("tol") = 1e-6);
    m.def(
        "l1_constrained_ls",
        [](const Matrix &X, const Vector &y, double budget, int max_iterations,
           double tol) {
            return solvers::l1_constrained_ls(X, y, budget,
                                              settings_from(max_iterations, tol));
        },
        py::arg("X"), py::arg("y"), py::arg("budget"),
        py::arg("max_iterations") = 50000, py::arg("tol") = 1e-6);
    m.def(
        "nuclear_constrained",
        [](const Matrix &Y, double budget) {
            const auto r = solvers::nuclear_constrained(Y, budget);
            return py::make_tuple(r.m_hat, r.theta);
        },
        py::arg("Y"), py::arg("budget"), "Returns (M_hat, theta).");

    py::class_<estimators::RegressionFit>(m, "RegressionFit")
        .def_readonly("beta_hat", &estimators::RegressionFit::beta_hat)
        .def_readonly("sigma_hat", &estimators::RegressionFit::sigma_hat)
        .def_readonly("fitted", &estimators::RegressionFit::fitted)
        .def_readonly("support", &estimators::RegressionFit::support)
        .def_readonly("gamma", &estimators::RegressionFit::gamma)
        .def_readonly("m1", &estimators::RegressionFit::m1)
        .def_readonly("m2", &estimators::RegressionFit::m2)
        .def_readonly("rank_k", &estimators::RegressionFit::rank_k)
        .def_readonly("residual_sq", &estimators::RegressionFit::residual_sq)
        .def_readonly("budget", &estimators::RegressionFit::budget)
        .def_readonly("seed", &estimators::RegressionFit::seed)
        .def_readonly("warnings", &estimators::RegressionFit::warnings);
    m.def(
        "regression_fit",
        [](const Matrix &X, const Vector &Y, std::uint64_t seed, int max_iterations,
           double tol) {
            return estimators::regression_fit(X, Y, GaussianSampler(seed),
                                              settings_from(max_iterations, tol));
        },
        py::arg("X"), py::arg("Y"), py::arg("seed"),
        py::arg("max_iterations") = 50000, py::arg("tol") = 1e-6);
    m.def(
        "regression_fit_with_noise",
        [](const Matrix &X, const Vector &Y, const Vector &Z, int max_iterations,
           double tol) {
            return estimators::regression_fit(X, Y, Z, settings_from(max_iterations, tol));
        },
        py::arg("X"), py::arg("Y"), py::arg("Z"), py::arg("max_iterations") = 50000,
        py::arg("tol") = 1e-6);

    py::class_<estimators::MatrixFit>(m, "MatrixFit")
        .def_readonly("m_hat", &estimators::MatrixFit::m_hat)
        .def_readonly("sigma_hat", &estimators::MatrixFit::sigma_hat)
        .def_readonly("theta", &estimators::MatrixFit::theta)
        .def_readonly("nuclear_y", &estimators::MatrixFit::nuclear_y)
        .def_readonly("nuclear_z", &estimators::MatrixFit::nuclear_z)
        .def_readonly("budget", &estimators::MatrixFit::budget)
        .def_readonly("singular_values", &estimators::MatrixFit::singular_values);
    m.def(
        "matrix_fit",
        [](const Matrix &Y, std::uint64_t seed) {
            return estimators::matrix_fit(Y, GaussianSampler(seed));
        },
        py::arg("Y"), py::arg("seed"));
    m.def(
        "matrix_fit_with_noise",
        [](const Matrix &Y, const Matrix &Z) { return estimators::matrix_fit(Y, Z); },
        py::arg("Y"), py::arg("Z"));

    py::class_<CvLassoResult>(m, "CvLassoResult")
        .def_readonly("beta", &CvLassoResult::beta)
        .def_readonly("lambda_", &CvLassoResult::lambda)
        .def_readonly("lambda_index", &CvLassoResult::lambda_index)
        .def_readonly("lambdas", &CvLassoResult::lambdas)
        .def_readonly("cv_error", &CvLassoResult::cv_error);
    m.def(
        "cv_lasso",
        [](const Matrix &X, const Vector &y, std::uint64_t seed, int folds,
           std::vector<Index> unpenalized) {
            LassoOptions options;
            options.folds = folds;
            options.unpenalized = std::move(unpenalized);
            return cv_lasso(X, y, options, seed);
        },
        py::arg("X"), py::arg("y"), py::arg("seed"), py::arg("folds") = 10,
        py::arg("unpenalized") = std::vector<Index>{});

    m.def("gen_design", &gen_design, py::arg("n"), py::arg("p"), py::arg("seed"),
          "n x (p + 1) Gaussian design with an intercept in column 0.");
    m.def("gen_response", &gen_response, py::arg("X"), py::arg("beta0"),
          py::arg("sigma"), py::arg("seed"));
    m.def(
        "normal_vector",
        [](std::uint64_t seed, Index n, std::uint64_t stream) {
            return GaussianSampler(seed, stream).normal_vector(n);
        },
        py::arg("seed"), py::arg("n"), py::arg("stream") = 0);
}
