#include "tunefree/estimators.hpp"
#include "tunefree/io.hpp"
#include "tunefree/sim.hpp"
#include "tunefree/standardize.hpp"

#include <CLI11.hpp>

#include <unistd.h>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace tunefree;

namespace {

constexpr int kInputError = 2;
constexpr int kSolverError = 3;

struct Common {
    std::optional<std::uint64_t> seed;
    std::string format;
    std::string output;
    double tol = 0.0;
    int max_iterations = 0;
};

solvers::SolverSettings solver_settings(const Common &c) {
    solvers::SolverSettings s;
    if (c.tol > 0.0) {
        s.primal_tolerance = c.tol;
        s.dual_tolerance = c.tol;
    }
    if (c.max_iterations > 0)
        s.max_iterations = c.max_iterations;
    s.validate();
    return s;
}

std::uint64_t require_seed(const Common &c, const char *command) {
    if (!c.seed)
        throw InputError(std::string(command) + " needs --seed");
    return *c.seed;
}

io::Format choose_format(const Common &c) {
    if (!c.format.empty())
        return io::parse_format(c.format);
    if (c.output.empty() && isatty(STDOUT_FILENO))
        return io::Format::Pretty;
    return io::Format::JsonLines;
}

void emit(const Common &c, const std::vector<io::Json> &records) {
    const std::string text = io::render(records, choose_format(c));
    if (c.output.empty())
        std::cout << text << std::flush;
    else
        io::write_text(c.output, text);
}

// ---------------------------------------------------------------------------

struct RegressArgs {
    std::string design;
    std::string response;
    std::string estimate;
    bool standardize = true;
};

void cmd_regress(const Common &c, const RegressArgs &a) {
    const std::uint64_t seed = require_seed(c, "regress");
    const Matrix X = io::read_matrix(a.design);
    const Vector Y = io::read_vector(a.response);
    if (X.rows() != Y.size())
        throw InputError("design has " + std::to_string(X.rows()) +
                         " rows but the response has " + std::to_string(Y.size()));

    std::optional<Standardization> st;
    if (a.standardize)
        st = standardize(X);
    estimators::RegressionFit fit = estimators::regression_fit(
        st ? st->transformed : X, Y, GaussianSampler(seed), solver_settings(c));
    if (st) {
        fit.beta_hat = st->to_original(fit.beta_hat);
        fit.support_threshold = estimators::support_threshold(fit.beta_hat);
        fit.support = estimators::support_of(fit.beta_hat, fit.support_threshold);
    }

    io::Json inputs;
    inputs["design"] = a.design;
    inputs["response"] = a.response;
    inputs["n"] = X.rows();
    inputs["p"] = X.cols();
    inputs["standardize"] = a.standardize;
    emit(c, {io::regression_record(fit, inputs)});

    if (!a.estimate.empty()) {
        std::ostringstream os;
        io::write_vector(os, fit.beta_hat);
        io::write_text(a.estimate, os.str());
    }
}

// ---------------------------------------------------------------------------

struct DenoiseArgs {
    std::string matrix;
    std::string noise;
    std::string estimate;
};

void cmd_denoise(const Common &c, const DenoiseArgs &a) {
    const Matrix Y = io::read_matrix(a.matrix);
    estimators::MatrixFit fit;
    if (!a.noise.empty()) {
        const Matrix Z = io::read_matrix(a.noise);
        fit = estimators::matrix_fit(Y, Z);
    } else {
        fit = estimators::matrix_fit(Y, GaussianSampler(require_seed(c, "denoise")));
    }

    io::Json inputs;
    inputs["matrix"] = a.matrix;
    if (!a.noise.empty())
        inputs["noise"] = a.noise;
    emit(c, {io::matrix_record(fit, inputs)});

    if (!a.estimate.empty()) {
        std::ostringstream os;
        io::write_matrix(os, fit.m_hat);
        io::write_text(a.estimate, os.str());
    }
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string preset;
    std::string scenario_file;
    std::optional<int> replications;
    std::vector<int> rows;
    int folds = 10;
    int threads = 1;
    bool standardize = false;
    bool no_cv = false;
    bool no_timing = false;
    // Matrix mode.
    std::vector<Index> matrix_size;
    Index matrix_rank = 2;
    double matrix_sigma = 1.0;
    double matrix_s = 0.5;
};

void strip_timing(std::vector<io::Json> &records) {
    for (auto &r : records)
        if (r.contains("seconds"))
            r["seconds"] = 0.0;
}

void cmd_simulate(const Common &c, const SimulateArgs &a) {
    const std::uint64_t seed = require_seed(c, "simulate");
    if (a.replications && *a.replications < 1)
        throw InputError("--replications must be at least 1");

    if (!a.matrix_size.empty()) {
        if (a.matrix_size.size() != 2)
            throw InputError("--matrix expects two sizes, l and m");
        sim::MatrixScenario sc;
        sc.l = a.matrix_size[0];
        sc.m = a.matrix_size[1];
        sc.rank = a.matrix_rank;
        sc.sigma = a.matrix_sigma;
        sc.target_s = a.matrix_s;
        sc.replications = a.replications.value_or(50);
        sc.seed = seed;
        auto records = io::matrix_sim_records(sim::run_matrix_scenario(sc));
        if (a.no_timing)
            strip_timing(records);
        emit(c, records);
        return;
    }

    std::vector<sim::Scenario> scenarios;
    if (!a.preset.empty() && !a.scenario_file.empty())
        throw InputError("use either --preset or --scenario, not both");
    if (!a.preset.empty()) {
        if (a.preset != "table1")
            throw InputError("unknown preset '" + a.preset + "'");
        scenarios = sim::table1_preset(a.replications.value_or(100), seed);
    } else if (!a.scenario_file.empty()) {
        scenarios = io::parse_scenarios(io::read_text(a.scenario_file));
        for (std::size_t i = 0; i < scenarios.size(); ++i) {
            if (a.replications)
                scenarios[i].replications = *a.replications;
            // A scenario without its own seed derives one from --seed.
            if (scenarios[i].base_seed == 0)
                scenarios[i].base_seed = derive_seed(seed, i + 1, 0);
        }
    } else {
        throw InputError("simulate needs --preset, --scenario or --matrix");
    }

    std::vector<sim::Scenario> chosen;
    if (a.rows.empty()) {
        chosen = scenarios;
    } else {
        for (int r : a.rows) {
            if (r < 1 || r > static_cast<int>(scenarios.size()))
                throw InputError("--rows entry " + std::to_string(r) +
                                 " is outside 1.." + std::to_string(scenarios.size()));
            chosen.push_back(scenarios[r - 1]);
        }
    }

    sim::SimSettings settings;
    settings.solver = solver_settings(c);
    settings.lasso.folds = a.folds;
    settings.standardize = a.standardize;
    settings.run_cv_lasso = !a.no_cv;
    settings.threads = a.threads;

    std::vector<io::Json> records;
    for (const auto &sc : chosen) {
        sc.validate();
        auto part = io::sim_records(sim::run_scenario(sc, settings));
        records.insert(records.end(), part.begin(), part.end());
    }
    if (a.no_timing)
        strip_timing(records);
    emit(c, records);
}

// ---------------------------------------------------------------------------

struct BoundsArgs {
    std::string kind = "regression";
    Index n = 0, p = 0, l = 0, m = 0;
    double sigma = 0.0;
    double beta_l1 = 0.0;
    double gamma = 1.0;
    double nuclear = 0.0;
    int samples = 200;
};

void cmd_bounds(const Common &c, const BoundsArgs &a) {
    io::Json inputs;
    inputs["sigma"] = a.sigma;
    estimators::RiskBound b;
    if (a.kind == "regression") {
        inputs["n"] = a.n;
        inputs["p"] = a.p;
        inputs["beta0_l1"] = a.beta_l1;
        inputs["gamma"] = a.gamma;
        b = estimators::regression_risk_bounds({a.n, a.p, a.sigma, a.beta_l1, a.gamma});
    } else if (a.kind == "matrix") {
        inputs["l"] = a.l;
        inputs["m"] = a.m;
        inputs["nuclear"] = a.nuclear;
        b = estimators::matrix_risk_bounds({a.l, a.m, a.sigma, a.nuclear}, a.samples,
                                           c.seed.value_or(0));
    } else {
        throw InputError("--kind must be regression or matrix");
    }
    emit(c, {io::bound_record(a.kind, b, inputs)});
}

void add_common(CLI::App *cmd, Common &c, bool with_tol) {
    cmd->add_option("--seed", c.seed, "Seed for the randomized estimator");
    cmd->add_option("--format", c.format,
                    "Report format: json-lines, csv or pretty-table "
                    "(default: pretty-table on a terminal, json-lines otherwise)");
    cmd->add_option("--output,-o", c.output, "Write the report to this file");
    if (with_tol) {
        cmd->add_option("--tol", c.tol, "Solver tolerance")->check(CLI::PositiveNumber);
        cmd->add_option("--max-iterations", c.max_iterations, "Solver step limit")
            ->check(CLI::PositiveNumber);
    }
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Tuning-free sparse regression and matrix denoising"};
    app.require_subcommand(1);

    Common common;

    RegressArgs ra;
    auto *regress = app.add_subcommand("regress", "Fit the tuning-free regression estimator");
    regress->add_option("design", ra.design, "Design matrix CSV")->required();
    regress->add_option("response", ra.response, "Response vector CSV")->required();
    regress->add_flag("--standardize,!--no-standardize", ra.standardize,
                      "Center and scale design columns (default on)");
    regress->add_option("--estimate", ra.estimate, "Write beta_hat as CSV");
    add_common(regress, common, true);

    DenoiseArgs da;
    auto *denoise = app.add_subcommand("denoise", "Denoise a matrix by nuclear-norm shrinkage");
    denoise->add_option("matrix", da.matrix, "Observed matrix CSV")->required();
    denoise->add_option("--noise-file", da.noise,
                        "Use this matrix as the auxiliary noise draw instead of sampling");
    denoise->add_option("--estimate", da.estimate, "Write M_hat as CSV");
    add_common(denoise, common, false);

    SimulateArgs sa;
    auto *simulate = app.add_subcommand("simulate", "Run simulation scenarios");
    simulate->add_option("--preset", sa.preset, "Built-in scenario set (table1)");
    simulate->add_option("--scenario", sa.scenario_file, "Scenario file");
    simulate->add_option("--replications", sa.replications, "Replications per scenario");
    simulate->add_option("--rows", sa.rows, "1-based scenario rows to run")->delimiter(',');
    simulate->add_option("--folds", sa.folds, "Cross-validation folds for the Lasso baseline")
        ->check(CLI::Range(2, 1000));
    simulate->add_option("--threads", sa.threads, "Worker threads")->check(CLI::Range(1, 1024));
    simulate->add_flag("--standardize,!--no-standardize", sa.standardize,
                       "Standardize the design for the proposed estimator (default off)");
    simulate->add_flag("--no-cv", sa.no_cv, "Skip the cross-validated Lasso baseline");
    simulate->add_flag("--no-timing", sa.no_timing, "Report zero run times (byte-stable output)");
    simulate->add_option("--matrix", sa.matrix_size, "Matrix scenario sizes l,m")
        ->delimiter(',')->expected(2);
    simulate->add_option("--matrix-rank", sa.matrix_rank, "Rank of the matrix signal");
    simulate->add_option("--matrix-sigma", sa.matrix_sigma, "Noise level of the matrix scenario");
    simulate->add_option("--matrix-s", sa.matrix_s, "Signal size as the matrix rate s");
    add_common(simulate, common, true);

    BoundsArgs ba;
    auto *bounds = app.add_subcommand("bounds", "Evaluate the risk-bound terms with C = 1");
    bounds->add_option("--kind", ba.kind, "regression or matrix");
    bounds->add_option("--n", ba.n, "Sample size");
    bounds->add_option("--p", ba.p, "Number of covariates");
    bounds->add_option("--sigma", ba.sigma, "Noise level")->required();
    bounds->add_option("--beta-l1", ba.beta_l1, "l1 norm of the true coefficients");
    bounds->add_option("--gamma", ba.gamma, "Max column norm over sqrt(n)");
    bounds->add_option("--l", ba.l, "Matrix rows");
    bounds->add_option("--m", ba.m, "Matrix columns");
    bounds->add_option("--nuclear", ba.nuclear, "Nuclear norm of the true matrix");
    bounds->add_option("--samples", ba.samples, "Monte Carlo draws for the matrix moments");
    add_common(bounds, common, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kInputError;
    }

    try {
        if (*regress)
            cmd_regress(common, ra);
        else if (*denoise)
            cmd_denoise(common, da);
        else if (*simulate)
            cmd_simulate(common, sa);
        else if (*bounds)
            cmd_bounds(common, ba);
    } catch (const SolverError &e) {
        std::cerr << "tunefree: solver failure: " << e.what() << '\n';
        return kSolverError;
    } catch (const InputError &e) {
        std::cerr << "tunefree: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception &e) {
        std::cerr << "tunefree: " << e.what() << '\n';
        return kInputError;
    }
    return 0;
}
