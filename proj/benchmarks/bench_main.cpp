#include <benchmark/benchmark.h>

#include <vector>

#include "circlab/combinatorics.hpp"
#include "circlab/ensemble.hpp"
#include "circlab/experiments.hpp"
#include "circlab/limit_theory.hpp"
#include "circlab/rng.hpp"

using namespace circlab;

namespace {

CirculantSample sample(Kind kind, std::size_t n) {
    NormalStream s(n);
    std::vector<double> labels(label_count(kind, n));
    for (auto& x : labels) x = s.normal();
    return make_circulant(kind, n, 1.0, labels);
}

void BM_Normal(benchmark::State& state) {
    NormalStream s(1);
    for (auto _ : state) benchmark::DoNotOptimize(s.normal());
}
BENCHMARK(BM_Normal);

void BM_BrownianPaths(benchmark::State& state) {
    const TimeGrid grid({0.5, 1.0});
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sample_brownian_paths(512, grid, ++seed));
}
BENCHMARK(BM_BrownianPaths);

void BM_TraceSpectral(benchmark::State& state) {
    const auto s = sample(Kind::RC, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(trace_power(s, 4, TraceMethod::Spectral));
}
BENCHMARK(BM_TraceSpectral)->Arg(16)->Arg(512)->Arg(8192);

void BM_TraceDense(benchmark::State& state) {
    const auto s = sample(Kind::RC, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(trace_power(s, 4, TraceMethod::Dense));
}
BENCHMARK(BM_TraceDense)->Arg(16)->Arg(64);

void BM_TraceCombinatorial(benchmark::State& state) {
    const auto s = sample(Kind::SC, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(trace_power(s, 4, TraceMethod::Combinatorial));
}
BENCHMARK(BM_TraceCombinatorial)->Arg(8)->Arg(16);

void BM_WickMoment(benchmark::State& state) {
    const CovMatrix c{3, {2.0, 0.5, 0.3, 0.5, 1.0, 0.2, 0.3, 0.2, 1.5}};
    for (auto _ : state) benchmark::DoNotOptimize(wick_moment(c, {4, 4, 4}));
}
BENCHMARK(BM_WickMoment);

void BM_CountA2p(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(count_tuples(Family::A2p, n, {6, 0, 0}));
}
BENCHMARK(BM_CountA2p)->Arg(16)->Arg(32);

void BM_Oracle(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(exact_finite_n_cov(Kind::SC, 3, 3, 0.5, 1.0, 11));
}
BENCHMARK(BM_Oracle)->Unit(benchmark::kMillisecond);

void BM_CovarianceExperiment(benchmark::State& state) {
    ExperimentConfig c;
    c.n = 512;
    c.replicas = 200;
    for (auto _ : state) benchmark::DoNotOptimize(run_covariance_experiment(c));
}
BENCHMARK(BM_CovarianceExperiment)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
