// Runs the command-line tool as a subprocess.

#include "tunefree/io.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

using namespace tunefree;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string &args, bool merge_stderr = false) {
    const std::string cmd = std::string(TUNEFREE_CLI) + " " + args +
                            (merge_stderr ? " 2>&1" : " 2>/dev/null");
    Run r;
    FILE *pipe = popen(cmd.c_str(), "r");
    if (!pipe)
        return r;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0)
        r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("tunefree_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string file(const std::string &name, const std::string &text) {
        const auto path = (dir_ / name).string();
        std::ofstream(path) << text;
        return path;
    }
    std::string path(const std::string &name) { return (dir_ / name).string(); }

    fs::path dir_;
};

io::Json single_record(const std::string &out) {
    const auto records = io::parse_json_lines(out);
    EXPECT_EQ(records.size(), 1u);
    return records.empty() ? io::Json() : records[0];
}

} // namespace

TEST_F(Cli, RegressZeroResponse) {
    const auto X = file("X.csv", "a,b\n1,0\n0,1\n0,0\n");
    const auto Y = file("Y.csv", "0\n0\n0\n");
    const auto r = run("regress " + X + " " + Y + " --seed 7 --format json-lines");
    ASSERT_EQ(r.code, 0);
    const auto rec = single_record(r.out);
    EXPECT_EQ(rec["sigma_hat"].get<double>(), 0.0);
    EXPECT_EQ(rec["beta_hat"], io::Json::parse("[0.0, 0.0]"));
    EXPECT_TRUE(rec["support"].empty());
}

TEST_F(Cli, RegressIsReplayableAndGammaFollowsStandardization) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    Matrix X(12, 20);
    for (Index i = 0; i < X.size(); ++i)
        X.data()[i] = 1.5 * g(rng) + 0.7;
    X.col(0).setOnes();
    Vector Y = 2 * X.col(3);
    for (Index i = 0; i < 12; ++i)
        Y[i] += g(rng);
    std::ostringstream xs, ys;
    io::write_matrix(xs, X);
    io::write_vector(ys, Y);
    const auto xp = file("X.csv", xs.str());
    const auto yp = file("Y.csv", ys.str());

    const auto a = run("regress " + xp + " " + yp + " --seed 7 --format json-lines");
    const auto b = run("regress " + xp + " " + yp + " --seed 7 --format json-lines");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);

    // Independent column-norm recomputation of gamma on both designs.
    auto gamma_of = [](const Matrix &M) {
        double best = 0.0;
        for (Index j = 0; j < M.cols(); ++j) {
            double ss = 0.0;
            for (Index i = 0; i < M.rows(); ++i)
                ss += M(i, j) * M(i, j);
            best = std::max(best, std::sqrt(ss / static_cast<double>(M.rows())));
        }
        return best;
    };
    Matrix S = X;
    for (Index j = 1; j < S.cols(); ++j) {
        const double mean = S.col(j).mean();
        S.col(j).array() -= mean;
        S.col(j) *= std::sqrt(12.0) / S.col(j).norm();
    }
    const auto raw = run("regress " + xp + " " + yp + " --seed 7 --no-standardize --format json-lines");
    ASSERT_EQ(raw.code, 0);
    EXPECT_NEAR(single_record(raw.out)["gamma"].get<double>(), gamma_of(X), 1e-12);
    EXPECT_NEAR(single_record(a.out)["gamma"].get<double>(), gamma_of(S), 1e-12);
    EXPECT_NE(gamma_of(S), gamma_of(X));

    // The estimate file round-trips through the CSV reader.
    const auto est = path("beta.csv");
    ASSERT_EQ(run("regress " + xp + " " + yp + " --seed 7 --estimate " + est + " --output " + path("r.jsonl")).code, 0);
    const Vector beta = io::read_vector(est);
    const auto rec = io::parse_json_lines(io::read_text(path("r.jsonl")))[0];
    ASSERT_EQ(beta.size(), 20);
    for (Index j = 0; j < 20; ++j)
        EXPECT_EQ(beta[j], rec["beta_hat"][static_cast<std::size_t>(j)].get<double>());
}

TEST_F(Cli, RegressInputErrors) {
    const auto X = file("X.csv", "1,2\n3,4\n5,x\n");
    const auto Y = file("Y.csv", "1\n2\n3\n");
    const auto Y2 = file("Y2.csv", "1\n2\n");
    EXPECT_EQ(run("regress " + X + " " + Y + " --seed 1").code, 2);
    const auto good = file("G.csv", "1,2\n3,4\n5,6\n");
    EXPECT_EQ(run("regress " + good + " " + Y2 + " --seed 1").code, 2);
    EXPECT_EQ(run("regress " + good + " " + Y).code, 2); // no seed
    EXPECT_EQ(run("regress " + good + " " + path("missing.csv") + " --seed 1").code, 2);
    EXPECT_EQ(run("regress --bogus").code, 2);
}

TEST_F(Cli, SolverFailureExitsWithThreeAndNamesTheStep) {
    std::ostringstream xs, ys;
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    Matrix X(10, 30);
    for (Index i = 0; i < X.size(); ++i)
        X.data()[i] = g(rng);
    Vector Y(10);
    for (Index i = 0; i < 10; ++i)
        Y[i] = g(rng);
    io::write_matrix(xs, X);
    io::write_vector(ys, Y);
    const auto xp = file("X.csv", xs.str());
    const auto yp = file("Y.csv", ys.str());
    const auto r = run("regress " + xp + " " + yp + " --seed 1 --max-iterations 2", true);
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.out.find("step 4"), std::string::npos) << r.out;
    EXPECT_EQ(run("regress " + xp + " " + yp + " --seed 1").code, 0);
}

TEST_F(Cli, DenoiseExamples) {
    const auto Z0 = file("zero.csv", "0,0,0\n0,0,0\n");
    auto r = run("denoise " + Z0 + " --seed 3 --format json-lines");
    ASSERT_EQ(r.code, 0);
    auto rec = single_record(r.out);
    EXPECT_EQ(rec["sigma_hat"].get<double>(), 0.0);
    EXPECT_EQ(rec["m_hat"], io::Json::parse("[[0.0,0.0,0.0],[0.0,0.0,0.0]]"));

    const auto Y = file("Y.csv", "1,2\n3,4\n");
    EXPECT_EQ(run("denoise " + Y + " --noise-file " + Z0).code, 2); // shape mismatch
    EXPECT_EQ(run("denoise " + Y).code, 2);                         // no seed, no noise file

    // diag(3, 1) with a noise draw of nuclear norm 8 gives budget 1.
    const auto D = file("D.csv", "3,0\n0,1\n");
    const auto Zf = file("Z.csv", "8,0\n0,0\n");
    r = run("denoise " + D + " --noise-file " + Zf + " --format json-lines");
    ASSERT_EQ(r.code, 0);
    rec = single_record(r.out);
    EXPECT_NEAR(rec["budget"].get<double>(), 1.0, 1e-14);
    const double theta = 1 / std::sqrt(2.0);
    EXPECT_NEAR(rec["shrunk_singular_values"][0].get<double>(), 3 - theta, 1e-12);
    EXPECT_NEAR(rec["shrunk_singular_values"][1].get<double>(), 1 - theta, 1e-12);
    EXPECT_NEAR(rec["shrunk_singular_values"][0].get<double>(), 2.29289, 1e-5);
    EXPECT_NEAR(rec["shrunk_singular_values"][1].get<double>(), 0.29289, 1e-5);
}

TEST_F(Cli, DenoiseZeroBudgetCopiesInputExactly) {
    // Underflow drives sigma_hat, hence the budget, to exactly zero.
    const std::string text = "0.1,-0.3\n2.5e-07,1\n";
    const auto Y = file("Y.csv", text);
    const auto Zf = file("Z.csv", "1e300,0\n0,1e300\n");
    const auto est = path("m.csv");
    const auto r = run("denoise " + Y + " --noise-file " + Zf + " --estimate " + est +
                       " --format json-lines");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(single_record(r.out)["budget"].get<double>(), 0.0);
    EXPECT_EQ(io::read_text(est), text);
}

TEST_F(Cli, SimulatePresetAndScenarioFile) {
    auto r = run("simulate --preset table1 --replications 1 --rows 5 --seed 3 --no-cv --format json-lines");
    ASSERT_EQ(r.code, 0);
    const auto recs = io::parse_json_lines(r.out);
    ASSERT_EQ(recs.size(), 2u); // one replication plus the aggregate
    EXPECT_EQ(recs[0]["n"], 300);
    EXPECT_LE(recs[0]["true_positives"].get<int>(), 2);
    EXPECT_EQ(recs[1]["record"], "aggregate");

    EXPECT_EQ(run("simulate --preset table1 --replications 0 --seed 3").code, 2);
    EXPECT_EQ(run("simulate --preset table1 --replications 1 --rows 9 --seed 3").code, 2);
    EXPECT_EQ(run("simulate --preset table1 --replications 1").code, 2);
    EXPECT_EQ(run("simulate --preset nope --seed 1").code, 2);

    const auto spec = file("s.txt", "n = 30\np = 40\nsigma = 1\nbeta0 = 1:2\nreplications = 2\n");
    const std::string args = "simulate --scenario " + spec + " --seed 9 --no-timing --format csv";
    const auto a = run(args);
    const auto b = run(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    const auto rows = io::parse_csv_records(a.out);
    EXPECT_EQ(rows.size(), 2u * 2 + 2);
    EXPECT_EQ(rows.back().at("record"), "aggregate");

    const auto bad = file("bad.txt", "n = 30\np = 40\nsigma = -1\nbeta0 = 1:2\nreplications = 2\n");
    EXPECT_EQ(run("simulate --scenario " + bad + " --seed 9").code, 2);
}

TEST_F(Cli, SimulatePresetRowOneSelectsFewerFalsePositivesThanCv) {
    const auto r = run("simulate --preset table1 --replications 20 --rows 1 --seed 5 --format json-lines");
    ASSERT_EQ(r.code, 0);
    double proposed = -1.0;
    double cv = -1.0;
    for (const auto &rec : io::parse_json_lines(r.out)) {
        if (rec["record"] != "aggregate")
            continue;
        (rec["method"] == "proposed" ? proposed : cv) =
            rec["avg_false_positives"].get<double>();
    }
    ASSERT_GE(proposed, 0.0);
    ASSERT_GE(cv, 0.0);
    EXPECT_LT(proposed, cv);
}

TEST_F(Cli, SimulateMatrix) {
    const auto r = run("simulate --matrix 12,10 --matrix-rank 1 --replications 3 --seed 2 --no-timing");
    ASSERT_EQ(r.code, 0);
    const auto recs = io::parse_json_lines(r.out);
    ASSERT_EQ(recs.size(), 4u);
    EXPECT_EQ(recs.back()["record"], "matrix_aggregate");
}

TEST_F(Cli, Bounds) {
    auto r = run("bounds --n 100 --p 1000 --gamma 1 --sigma 2 --beta-l1 0 --format json-lines");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(single_record(r.out)["r"].get<double>(), 0.0);

    r = run("bounds --n 100 --p 1000 --gamma 1 --sigma 2 --beta-l1 2 --format csv");
    ASSERT_EQ(r.code, 0);
    const auto rows = io::parse_csv_records(r.out);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_NEAR(std::stod(rows[0].at("r")), std::sqrt(std::log(1100.0)) / 10, 1e-12);

    r = run("bounds --kind matrix --l 50 --m 50 --sigma 1 --nuclear 50 --samples 10 --format json-lines");
    ASSERT_EQ(r.code, 0);
    EXPECT_NEAR(single_record(r.out)["s"].get<double>(), 0.28284271247461906, 1e-12);

    EXPECT_EQ(run("bounds --n 100 --p 10 --sigma 0 --beta-l1 1").code, 2);
    EXPECT_EQ(run("bounds --n 100 --p 10 --sigma -1 --beta-l1 1").code, 2);
    EXPECT_EQ(run("bounds --kind other --sigma 1").code, 2);
}
