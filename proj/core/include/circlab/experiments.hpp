#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "circlab/combinatorics.hpp"
#include "circlab/ensemble.hpp"
#include "circlab/fluctuations.hpp"

namespace circlab {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ExperimentConfig {
    std::string id = "experiment";
    Kind kind = Kind::RC;
    std::vector<unsigned> orders{1, 1};
    std::vector<double> times{1.0, 1.0};
    std::size_t n = 512;
    std::size_t replicas = 20000;
    std::uint64_t seed = 20240611;
    Centering centering = Centering::Empirical;
    TheoryMode theory_mode = TheoryMode::Reconciled;
    double tolerance = 3.0;
    unsigned workers = 1;  // 0 selects the hardware concurrency
    TraceMethod method = TraceMethod::Auto;

    // Throws ConfigError on any invalid field.
    void validate() const;
    std::string canonical() const;
    std::string hash() const;
};

enum class Verdict { Pass, Fail, NotApplicable };
std::string_view to_string(Verdict v);

Verdict judge(double empirical, double reference, double se, double tolerance);

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

// Sample covariance ((R-1) denominator) with a batch-means standard error over ceil(sqrt(R)) batches.
Estimate estimate_covariance(const std::vector<double>& x, const std::vector<double>& y);

// (1/(R-1)) Σ_r Π_i (x_ir - mean_i) with batch-means SE; equals estimate_covariance for two columns.
Estimate estimate_joint_moment(const std::vector<std::vector<double>>& columns);

// Mean of f(x_r) with batch-means SE.
Estimate estimate_mean(const std::vector<double>& values);

// Per-entry, per-replica fluctuation values for entries (orders[i], times[i]).
std::vector<std::vector<double>> simulate_fluctuations(const ExperimentConfig& config);

// Fluctuation series of a single order on a full grid.
FluctuationSeries simulate_series(const ExperimentConfig& config, unsigned p, const TimeGrid& grid);

struct CovarianceReport {
    std::string experiment_id;
    Kind kind = Kind::RC;
    unsigned p = 1;
    unsigned q = 1;
    double t1 = 0.0;
    double t2 = 0.0;
    std::size_t n = 0;
    std::size_t replicas = 0;
    std::uint64_t seed = 0;
    double empirical = kNaN;
    double se = kNaN;
    double theory_paper = kNaN;
    double theory_reconciled = kNaN;
    double oracle = kNaN;
    Verdict verdict = Verdict::NotApplicable;          // against the configured theory mode
    Verdict verdict_reconciled = Verdict::NotApplicable;
    Verdict verdict_oracle = Verdict::NotApplicable;
    std::string config_hash;
};

CovarianceReport run_covariance_experiment(const ExperimentConfig& config);

struct JointMomentReport {
    std::string experiment_id;
    double empirical = kNaN;
    double se = kNaN;
    double reference_empirical_pairs = kNaN;  // Wick combination of empirical pair covariances
    double reference_theory = kNaN;           // Wick combination of limiting pair covariances
    Verdict verdict_self = Verdict::NotApplicable;
    Verdict verdict_theory = Verdict::NotApplicable;
    std::string config_hash;
};

JointMomentReport run_joint_moment_experiment(const ExperimentConfig& config);

struct TightnessPoint {
    double s = 0.0;
    double t = 0.0;
    double moment4 = 0.0;
    double se = 0.0;
};

struct TightnessReport {
    Kind kind = Kind::RC;
    unsigned p = 1;
    std::vector<TightnessPoint> points;
    double slope = kNaN;
    double slope_se = kNaN;
    double band_low = kNaN;
    double band_high = kNaN;
};

// Pairs (s, t) with s <= t; at least four distinct positive gaps with max/min >= 4.
TightnessReport run_tightness_diagnostic(const ExperimentConfig& base, unsigned p,
                                         const std::vector<std::pair<double, double>>& pairs);

struct OddStatisticReport {
    unsigned p = 1;
    std::size_t n = 0;
    double t = 1.0;
    Estimate mean;
    Estimate second;
    Estimate third;
    double reference_second = kNaN;
    Verdict verdict_mean = Verdict::NotApplicable;
    Verdict verdict_second = Verdict::NotApplicable;
    Verdict verdict_third = Verdict::NotApplicable;
};

// Moments of Σλ^{2p+1} over RC replicas at a single time.
OddStatisticReport run_odd_statistic_experiment(const ExperimentConfig& base, unsigned p, double t);

// Writes CSV rows (replica, t, value) of w_p / eta_p paths; write-then-rename.
void export_paths(const ExperimentConfig& config, unsigned p, const TimeGrid& grid,
                  const std::filesystem::path& out);

// Writes `contents` to `path` through a temporary sibling and an atomic rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Shortest round-trip formatting with the given significant digits.
std::string format_double(double v, int digits = 17);

}  // namespace circlab
