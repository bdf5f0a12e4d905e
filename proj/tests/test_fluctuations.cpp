#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "circlab/errors.hpp"
#include "circlab/fluctuations.hpp"
#include "circlab/rng.hpp"

using namespace circlab;

TEST(Fluctuations, TraceDegree) {
    EXPECT_EQ(trace_degree(Kind::RC, 3), 6u);
    EXPECT_EQ(trace_degree(Kind::SC, 3), 3u);
}

TEST(Fluctuations, CenteringNames) {
    EXPECT_EQ(parse_centering("exact"), Centering::Exact);
    EXPECT_EQ(parse_centering(to_string(Centering::Empirical)), Centering::Empirical);
    EXPECT_THROW(parse_centering("median"), ConfigError);
}

// Frozen from an exact rational expansion of E[Tr M^P] over Gaussian labels.
TEST(ExactExpectation, FrozenValues) {
    EXPECT_NEAR(exact_trace_expectation(Kind::RC, 2, 1.0, 5), 11.0, 1e-12);
    EXPECT_NEAR(exact_trace_expectation(Kind::RC, 2, 1.0, 6), 14.0, 1e-12);
    EXPECT_NEAR(exact_trace_expectation(Kind::SC, 4, 1.0, 5), 87.0 / 5.0, 1e-12);
    EXPECT_NEAR(exact_trace_expectation(Kind::SC, 4, 1.0, 6), 22.0, 1e-12);
    EXPECT_NEAR(exact_trace_expectation(Kind::SC, 2, 1.0, 7), 7.0, 1e-12);
}

TEST(ExactExpectation, SecondPowerAndTimeScaling) {
    for (std::size_t n = 1; n <= 16; ++n) {
        EXPECT_NEAR(exact_trace_expectation(Kind::RC, 1, 0.7, n), 0.7 * n, 1e-12);
        EXPECT_NEAR(exact_trace_expectation(Kind::SC, 2, 0.7, n), 0.7 * n, 1e-12);
        EXPECT_EQ(exact_trace_expectation(Kind::SC, 3, 1.0, n), 0.0);
    }
    EXPECT_NEAR(exact_trace_expectation(Kind::RC, 2, 0.5, 5), 11.0 * 0.25, 1e-12);
}

TEST(ExactExpectation, MatchesMonteCarlo) {
    const std::size_t n = 6, reps = 40000;
    double acc = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        NormalStream s(derive_seed(3, r));
        std::vector<double> labels(n);
        for (auto& x : labels) x = s.normal();
        acc += trace_power(make_circulant(Kind::RC, n, 1.0, labels), 4);
    }
    EXPECT_NEAR(acc / reps, exact_trace_expectation(Kind::RC, 2, 1.0, n), 0.3);
}

TEST(ExactExpectation, Caps) {
    EXPECT_THROW(exact_trace_expectation(Kind::RC, 4, 1.0, 8), CapacityError);
    EXPECT_THROW(exact_trace_expectation(Kind::SC, 2, 1.0, 17), CapacityError);
    EXPECT_THROW(exact_trace_expectation(Kind::SC, 2, -1.0, 5), DomainError);
}

TEST(Fluctuation, ExactCenteringFormula) {
    const std::vector<double> traces{7.0, 3.0, 5.5};
    const auto w = rc_fluctuation(traces, 2, 1.0, 6, Centering::Exact);
    for (std::size_t i = 0; i < traces.size(); ++i) EXPECT_NEAR(w[i], (traces[i] - 14.0) / std::sqrt(6.0), 1e-12);
}

TEST(Fluctuation, EmpiricalCenteringHasZeroMean) {
    const std::vector<double> traces{1.0, 4.0, 9.0, 16.0};
    const auto eta = sc_fluctuation(traces, 2, 1.0, 512, Centering::Empirical);
    EXPECT_NEAR(std::accumulate(eta.begin(), eta.end(), 0.0), 0.0, 1e-12);
    EXPECT_NEAR(eta[3] - eta[0], 15.0 / std::sqrt(512.0), 1e-12);
    EXPECT_THROW(sc_fluctuation(std::vector<double>{1.0}, 2, 1.0, 512, Centering::Empirical), ConfigError);
}

TEST(Eta1, EqualsCentralLabel) {
    const auto s = make_circulant(Kind::SC, 9, 1.0, {0.3, -1.2, 2.0, 0.1, 0.7});
    EXPECT_EQ(eta1_exact(s), 0.3);
    EXPECT_NEAR(trace_power(s, 1) / 3.0, 0.3, 1e-15);
}

TEST(OddStatistic, RejectsSymmetricCirculant) {
    const auto s = make_circulant(Kind::SC, 5, 1.0, {1.0, 2.0, 3.0});
    EXPECT_THROW(rc_odd_statistic(spectrum(s), 1, 1.0), KindError);
    const auto r = make_circulant(Kind::RC, 5, 1.0, {1.0, 2.0, 3.0, 4.0, 5.0});
    const double l0 = 15.0 / std::sqrt(5.0);
    EXPECT_NEAR(rc_odd_statistic(spectrum(r), 1, 1.0), l0 * l0 * l0, 1e-10);
}
