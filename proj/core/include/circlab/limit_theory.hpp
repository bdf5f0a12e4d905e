#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "circlab/combinatorics.hpp"
#include "circlab/kind.hpp"

namespace circlab {

struct CovQuery {
    Kind kind = Kind::RC;
    unsigned p = 1;
    unsigned q = 1;
    double t1 = 1.0;
    double t2 = 1.0;
};

double rc_limit_cov(const CovQuery& query, TheoryMode mode);
double sc_limit_cov(const CovQuery& query, TheoryMode mode);
double limit_cov(const CovQuery& query, TheoryMode mode);

// Symmetric covariance matrix, row-major dim x dim.
struct CovMatrix {
    std::size_t dim = 0;
    std::vector<double> values;

    double operator()(std::size_t i, std::size_t j) const { return values[i * dim + j]; }
};

inline constexpr unsigned kWickMaxOrder = 16;

// E[prod Z_i^{powers_i}] for a centered Gaussian vector with covariance `cov`.
double wick_moment(const CovMatrix& cov, const std::vector<unsigned>& powers);

struct JointEntry {
    Kind kind = Kind::RC;
    unsigned p = 1;
    double t = 1.0;
};

using PairCov = std::function<double(const JointEntry&, const JointEntry&)>;

// Sum over pair partitions of prod cov(pair); zero for an odd number of entries.
double gaussian_joint_moment(const std::vector<JointEntry>& entries, const PairCov& cov);

inline constexpr std::size_t kOracleMaxN = 12;
inline constexpr unsigned kOracleMaxRcP = 2;
inline constexpr unsigned kOracleMaxScP = 3;

// Exact Cov(w_p(t1), w_q(t2)) (RC) or Cov(eta_p(t1), eta_q(t2)) (SC) at dimension n.
double exact_finite_n_cov(Kind kind, unsigned p, unsigned q, double t1, double t2, std::size_t n);

struct Extrapolation {
    double limit = 0.0;
    double slope = 0.0;     // coefficient of 1/n
    double residual = 0.0;  // RMS misfit of the L + a/n model
};

// Least-squares fit of value(n) = L + a/n.
Extrapolation extrapolate_limit(const std::vector<std::pair<double, double>>& points);

}  // namespace circlab
