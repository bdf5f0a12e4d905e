#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "circlab/errors.hpp"
#include "circlab/experiments.hpp"
#include "circlab/rng.hpp"

using namespace circlab;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small(Kind kind, std::vector<unsigned> orders, std::vector<double> times) {
    ExperimentConfig c;
    c.id = "t";
    c.kind = kind;
    c.orders = std::move(orders);
    c.times = std::move(times);
    c.n = 32;
    c.replicas = 600;
    c.seed = 4242;
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("circlab_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST(Config, ValidationRejectsBadFields) {
    auto c = small(Kind::RC, {1, 1}, {1.0, 1.0});
    EXPECT_NO_THROW(c.validate());
    auto bad = c;
    bad.replicas = 1;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = c;
    bad.n = 1;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = c;
    bad.times = {1.0};
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = c;
    bad.tolerance = 0.0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = c;
    bad.centering = Centering::Exact;
    EXPECT_THROW(bad.validate(), CapacityError);
    EXPECT_THROW(run_covariance_experiment(bad), CapacityError);
}

TEST(Config, HashTracksEveryField) {
    const auto c = small(Kind::RC, {1, 1}, {1.0, 1.0});
    EXPECT_EQ(c.hash(), small(Kind::RC, {1, 1}, {1.0, 1.0}).hash());
    auto d = c;
    d.seed += 1;
    EXPECT_NE(c.hash(), d.hash());
    d = c;
    d.times[1] = 0.9999999999;
    EXPECT_NE(c.hash(), d.hash());
}

TEST(Verdict, ToleranceBand) {
    EXPECT_EQ(judge(1.3, 1.0, 0.1, 3.0), Verdict::Pass);
    EXPECT_EQ(judge(1.31, 1.0, 0.1, 3.0), Verdict::Fail);
    EXPECT_EQ(judge(1.0, kNaN, 0.1, 3.0), Verdict::NotApplicable);
    EXPECT_EQ(to_string(Verdict::NotApplicable), "not-applicable");
}

TEST(Estimators, KnownSmallSample) {
    const std::vector<double> x{1, 2, 3, 4}, y{2, 4, 6, 8};
    EXPECT_NEAR(estimate_covariance(x, y).value, 10.0 / 3.0, 1e-12);
    EXPECT_NEAR(estimate_mean(x).value, 2.5, 1e-12);
    EXPECT_NEAR(estimate_joint_moment({x, y}).value, estimate_covariance(x, y).value, 1e-15);
}

TEST(Estimators, CoverageOnSyntheticGaussians) {
    const double rho = 0.6;
    int covered = 0;
    for (int rep = 0; rep < 200; ++rep) {
        NormalStream s(derive_seed(777, static_cast<std::uint64_t>(rep)));
        std::vector<double> x(2500), y(2500);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = s.normal();
            y[i] = rho * x[i] + std::sqrt(1 - rho * rho) * s.normal();
        }
        const auto e = estimate_covariance(x, y);
        covered += judge(e.value, rho, e.se, 3.0) == Verdict::Pass;
    }
    EXPECT_GE(covered, 198);
}

TEST(Covariance, DeterministicAcrossWorkerCounts) {
    auto c = small(Kind::SC, {2, 3}, {0.5, 1.0});
    const auto a = run_covariance_experiment(c);
    c.workers = 3;
    const auto b = run_covariance_experiment(c);
    EXPECT_EQ(a.empirical, b.empirical);
    EXPECT_EQ(a.se, b.se);
    EXPECT_EQ(a.config_hash, b.config_hash);
    const auto cols1 = simulate_fluctuations(c);
    c.workers = 1;
    EXPECT_EQ(cols1, simulate_fluctuations(c));
}

TEST(Covariance, ReportFieldsAndOracle) {
    auto c = small(Kind::RC, {1, 1}, {0.5, 1.0});
    c.n = 8;
    const auto r = run_covariance_experiment(c);
    EXPECT_EQ(r.p, 1u);
    EXPECT_EQ(r.replicas, 600u);
    EXPECT_NEAR(r.theory_reconciled, 0.5, 1e-12);
    EXPECT_EQ(r.theory_paper, 0.0);
    EXPECT_NEAR(r.oracle, 0.5, 1e-12);
    EXPECT_EQ(r.verdict, r.verdict_reconciled);
    EXPECT_NE(r.verdict_oracle, Verdict::NotApplicable);
    c.n = 32;
    EXPECT_TRUE(std::isnan(run_covariance_experiment(c).oracle));
    c.theory_mode = TheoryMode::PaperLiteral;
    EXPECT_EQ(run_covariance_experiment(c).verdict, Verdict::NotApplicable);
}

TEST(Covariance, RequiresOrderedPair) {
    EXPECT_THROW(run_covariance_experiment(small(Kind::RC, {1, 1, 1}, {1.0, 1.0, 1.0})), ConfigError);
    EXPECT_THROW(run_covariance_experiment(small(Kind::RC, {1, 1}, {1.0, 0.5})), ConfigError);
}

TEST(Covariance, ExactAndEmpiricalCenteringAgree) {
    auto c = small(Kind::RC, {1, 2}, {0.5, 1.0});
    c.n = 10;
    const auto a = run_covariance_experiment(c);
    c.centering = Centering::Exact;
    const auto b = run_covariance_experiment(c);
    EXPECT_NEAR(a.empirical, b.empirical, 1e-9 * std::fabs(a.empirical));
}

TEST(Covariance, StableAcrossDimension) {
    auto c = small(Kind::RC, {1, 1}, {1.0, 1.0});
    c.replicas = 4000;
    c.n = 256;
    const auto a = run_covariance_experiment(c);
    c.n = 512;
    const auto b = run_covariance_experiment(c);
    EXPECT_LT(std::fabs(a.empirical - b.empirical), 3.0 * std::hypot(a.se, b.se));
}

TEST(JointMoment, TwoEntriesReduceToCovariance) {
    const auto c = small(Kind::RC, {1, 2}, {0.5, 1.0});
    const auto cov = run_covariance_experiment(c);
    const auto joint = run_joint_moment_experiment(c);
    EXPECT_NEAR(joint.empirical, cov.empirical, 1e-12);
    EXPECT_NEAR(joint.reference_empirical_pairs, cov.empirical, 1e-12);
}

TEST(JointMoment, OddOrderReferencesVanish) {
    const auto r = run_joint_moment_experiment(small(Kind::SC, {2, 2, 2}, {0.5, 1.0, 1.0}));
    EXPECT_EQ(r.reference_empirical_pairs, 0.0);
    EXPECT_EQ(r.reference_theory, 0.0);
}

TEST(Tightness, CoincidentTimesGiveZeroIncrements) {
    const auto cols = simulate_fluctuations(small(Kind::RC, {2, 2}, {0.7, 0.7}));
    EXPECT_EQ(cols[0], cols[1]);
}

TEST(Tightness, SpacingValidation) {
    const auto c = small(Kind::RC, {2}, {1.0});
    EXPECT_THROW(run_tightness_diagnostic(c, 2, {{0.5, 0.6}, {0.5, 0.7}, {0.5, 0.8}}), ConfigError);
    EXPECT_THROW(run_tightness_diagnostic(c, 2, {{0.5, 0.6}, {0.5, 0.65}, {0.5, 0.7}, {0.5, 0.75}}), ConfigError);
    EXPECT_THROW(run_tightness_diagnostic(c, 2, {{0.5, 0.4}, {0.5, 0.6}, {0.5, 0.7}, {0.5, 0.9}}), ConfigError);
}

TEST(Tightness, ReportsSlopeAndBand) {
    auto c = small(Kind::SC, {2}, {1.0});
    const auto r = run_tightness_diagnostic(c, 2, {{0.5, 0.55}, {0.5, 0.6}, {0.5, 0.7}, {0.5, 0.9}});
    ASSERT_EQ(r.points.size(), 4u);
    EXPECT_TRUE(std::isfinite(r.slope));
    EXPECT_LT(r.band_low, r.slope);
    EXPECT_GT(r.band_high, r.slope);
    for (const auto& pt : r.points) EXPECT_GT(pt.moment4, 0.0);
}

TEST(OddStatistic, RequiresEnoughReplicas) {
    auto c = small(Kind::RC, {1}, {1.0});
    EXPECT_THROW(run_odd_statistic_experiment(c, 1, 1.0), ConfigError);
    c.replicas = 10000;
    c.n = 33;
    const auto r = run_odd_statistic_experiment(c, 1, 1.0);
    EXPECT_EQ(r.reference_second, 15.0);
    c.n = 34;
    EXPECT_EQ(run_odd_statistic_experiment(c, 1, 1.0).reference_second, 30.0);
}

TEST(Paths, ShapeZeroOriginAndDeterminism) {
    const fs::path dir = scratch("paths");
    auto c = small(Kind::RC, {2}, {1.0});
    c.replicas = 2;
    const TimeGrid grid({0.0, 0.5, 1.0});
    export_paths(c, 2, grid, dir / "a.csv");
    export_paths(c, 2, grid, dir / "b.csv");
    const std::string a = slurp(dir / "a.csv");
    EXPECT_EQ(a, slurp(dir / "b.csv"));
    std::istringstream in(a);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "replica,t,value");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        if (line.find(",0.0,") != std::string::npos) {
            EXPECT_EQ(line.substr(line.rfind(',') + 1), "0.0");
        }
    }
    EXPECT_EQ(rows, 6);
    EXPECT_FALSE(fs::exists(dir / "a.csv.tmp"));
    fs::remove_all(dir);
}

TEST(Output, AtomicWriteFailsCleanly) {
    EXPECT_THROW(write_file_atomic("/nonexistent_dir_for_circlab/x.csv", "data"), IoError);
}

TEST(Output, DoubleFormatting) {
    EXPECT_EQ(format_double(2.0), "2.0");
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(1.0 / 3.0, 6), "0.333333");
    EXPECT_EQ(std::stod(format_double(M_PI)), M_PI);
}
