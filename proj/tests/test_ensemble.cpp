#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Dense>

#include "circlab/ensemble.hpp"
#include "circlab/errors.hpp"
#include "circlab/rng.hpp"

using namespace circlab;

namespace {

std::vector<double> normals(std::size_t count, std::uint64_t seed) {
    NormalStream s(seed);
    std::vector<double> v(count);
    for (auto& x : v) x = s.normal();
    return v;
}

// Reference matrix built straight from the index laws, without CirculantSample::entry.
Eigen::MatrixXd reference_matrix(Kind kind, std::size_t n, const std::vector<double>& labels) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const double root = std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t label;
            if (kind == Kind::RC) {
                label = (i + j) % n;
            } else {
                const long long d = std::llabs(static_cast<long long>(i) - static_cast<long long>(j));
                const long long half = static_cast<long long>(n) / 2;
                label = static_cast<std::size_t>(half - std::llabs(half - d));
                if (n % 2) label = static_cast<std::size_t>(std::min(d, static_cast<long long>(n) - d));
            }
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = labels[label] / root;
        }
    return m;
}

}  // namespace

TEST(TimeGrid, Validation) {
    EXPECT_THROW(TimeGrid(std::vector<double>{}), ConfigError);
    EXPECT_THROW(TimeGrid({0.5, 0.5}), ConfigError);
    EXPECT_THROW(TimeGrid({-0.1, 1.0}), ConfigError);
    EXPECT_THROW(TimeGrid({0.0, NAN}), ConfigError);
    const TimeGrid g({0.0, 0.5, 1.0});
    EXPECT_TRUE(g.contains(0.5));
    EXPECT_EQ(g.index_of(1.0), 2u);
    EXPECT_THROW(g.index_of(0.7), LookupError);
}

TEST(Rng, DerivedSeedsAreDistinctAndStable) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(7, i));
    EXPECT_EQ(seen.size(), 1000u);
    EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
    EXPECT_NE(derive_seed(7, 3), derive_seed(8, 3));
}

TEST(Rng, UniformsAreOpenInterval) {
    NormalStream s(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = s.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(Rng, NormalMoments) {
    const auto v = normals(200000, 99);
    double m1 = 0, m2 = 0, m4 = 0;
    for (double x : v) {
        m1 += x;
        m2 += x * x;
        m4 += x * x * x * x;
    }
    const double n = static_cast<double>(v.size());
    EXPECT_NEAR(m1 / n, 0.0, 0.01);
    EXPECT_NEAR(m2 / n, 1.0, 0.01);
    EXPECT_NEAR(m4 / n, 3.0, 0.06);
}

TEST(Brownian, DeterministicAndZeroAtOrigin) {
    const TimeGrid grid({0.0, 0.25, 1.0});
    const auto a = sample_brownian_paths(16, grid, 5);
    const auto b = sample_brownian_paths(16, grid, 5);
    const auto c = sample_brownian_paths(16, grid, 6);
    EXPECT_EQ(a.values, b.values);
    EXPECT_NE(a.values, c.values);
    for (std::size_t l = 0; l < 16; ++l) EXPECT_EQ(a.value(l, 0), 0.0);
}

TEST(Brownian, IncrementCovariance) {
    const TimeGrid grid({0.5, 2.0});
    const std::size_t labels = 40000;
    const auto e = sample_brownian_paths(labels, grid, 11);
    double v1 = 0, v2 = 0, c12 = 0;
    for (std::size_t l = 0; l < labels; ++l) {
        v1 += e.value(l, 0) * e.value(l, 0);
        v2 += e.value(l, 1) * e.value(l, 1);
        c12 += e.value(l, 0) * e.value(l, 1);
    }
    EXPECT_NEAR(v1 / labels, 0.5, 0.02);
    EXPECT_NEAR(v2 / labels, 2.0, 0.06);
    EXPECT_NEAR(c12 / labels, 0.5, 0.03);
}

TEST(Circulant, EntriesFollowIndexLaws) {
    for (Kind kind : {Kind::RC, Kind::SC})
        for (std::size_t n : {1u, 2u, 5u, 6u, 9u}) {
            const auto labels = normals(label_count(kind, n), n);
            const auto s = make_circulant(kind, n, 1.0, labels);
            const auto ref = reference_matrix(kind, n, labels);
            const auto dense = dense_matrix(s);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    EXPECT_EQ(s.entry(i, j), ref(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
                    EXPECT_EQ(dense[i * n + j], s.entry(i, j));
                    EXPECT_EQ(s.entry(i, j), s.entry(j, i));
                }
        }
}

TEST(Circulant, LabelCountsAndErrors) {
    EXPECT_EQ(label_count(Kind::RC, 8), 8u);
    EXPECT_EQ(label_count(Kind::SC, 8), 5u);
    EXPECT_EQ(label_count(Kind::SC, 7), 4u);
    EXPECT_THROW(make_circulant(Kind::RC, 4, 1.0, {1.0, 2.0}), ConfigError);
    EXPECT_THROW(make_circulant(Kind::RC, 0, 1.0, {}), ConfigError);
    EXPECT_EQ(parse_kind("sc"), Kind::SC);
    EXPECT_THROW(parse_kind("gue"), ConfigError);
}

TEST(Spectrum, MatchesDenseSymmetricSolver) {
    for (Kind kind : {Kind::RC, Kind::SC})
        for (std::size_t n : {1u, 2u, 3u, 4u, 7u, 8u, 12u, 33u}) {
            const auto labels = normals(label_count(kind, n), 100 + n);
            const auto spec = spectrum(make_circulant(kind, n, 1.0, labels));
            ASSERT_EQ(spec.eigenvalues.size(), n);
            Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(reference_matrix(kind, n, labels))
                                     .eigenvalues();
            std::vector<double> mine(spec.eigenvalues), ref(ev.data(), ev.data() + ev.size());
            std::sort(mine.begin(), mine.end());
            std::sort(ref.begin(), ref.end());
            for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(mine[k], ref[k], 1e-10) << n;
        }
}

TEST(Spectrum, ReverseCirculantPairs) {
    for (std::size_t n : {9u, 10u, 64u}) {
        const auto spec = spectrum(make_circulant(Kind::RC, n, 1.0, normals(n, n)));
        for (std::size_t k = 1; 2 * k < n; ++k)
            EXPECT_NEAR(spec.eigenvalues[k], -spec.eigenvalues[n - k], 1e-12);
    }
}

TEST(Trace, MethodsAgreeWithMatrixPower) {
    for (Kind kind : {Kind::RC, Kind::SC})
        for (std::size_t n : {2u, 5u, 8u, 11u, 16u}) {
            const auto labels = normals(label_count(kind, n), 7 * n);
            const auto s = make_circulant(kind, n, 1.0, labels);
            const Eigen::MatrixXd m = reference_matrix(kind, n, labels);
            Eigen::MatrixXd pw = Eigen::MatrixXd::Identity(m.rows(), m.cols());
            for (unsigned p = 1; p <= 4; ++p) {
                pw = pw * m;
                const double want = pw.trace();
                const double scale = std::max(1.0, std::fabs(want));
                for (TraceMethod method :
                     {TraceMethod::Spectral, TraceMethod::Dense, TraceMethod::Combinatorial, TraceMethod::Auto})
                    EXPECT_NEAR(trace_power(s, p, method), want, 1e-9 * scale)
                        << to_string(kind) << " n=" << n << " p=" << p << " " << to_string(method);
            }
            EXPECT_DOUBLE_EQ(trace_power(s, 0), static_cast<double>(n));
        }
}

TEST(Trace, AutoResolutionAndCaps) {
    EXPECT_EQ(resolve_trace_method(16, 2, TraceMethod::Auto), TraceMethod::Dense);
    EXPECT_EQ(resolve_trace_method(64, 2, TraceMethod::Auto), TraceMethod::Spectral);
    EXPECT_EQ(resolve_trace_method(8, 3, TraceMethod::Auto), TraceMethod::Spectral);
    EXPECT_EQ(resolve_trace_method(512, 1, TraceMethod::Dense), TraceMethod::Dense);
    const auto big = make_circulant(Kind::RC, 17, 1.0, normals(17, 1));
    EXPECT_THROW(trace_power(big, 2, TraceMethod::Combinatorial), CapacityError);
    const auto small = make_circulant(Kind::SC, 6, 1.0, normals(4, 1));
    EXPECT_THROW(trace_power(small, 5, TraceMethod::Combinatorial), CapacityError);
    EXPECT_EQ(parse_trace_method("dense"), TraceMethod::Dense);
    EXPECT_THROW(parse_trace_method("lanczos"), ConfigError);
}

TEST(Trace, PowerSumIsCompensated) {
    Spectrum spec{Kind::SC, 4, {1e16, 1.0, -1e16, 1.0}};
    EXPECT_EQ(power_sum(spec, 1), 2.0);
}
