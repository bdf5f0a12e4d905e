#include "circlab/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <string>

#include <Eigen/Dense>
#include <fftw3.h>

#include "circlab/combinatorics.hpp"
#include "circlab/errors.hpp"
#include "circlab/numeric.hpp"
#include "circlab/rng.hpp"

namespace circlab {

std::string_view to_string(Kind k) { return k == Kind::RC ? "rc" : "sc"; }

Kind parse_kind(std::string_view name) {
    if (name == "rc" || name == "RC") return Kind::RC;
    if (name == "sc" || name == "SC") return Kind::SC;
    throw ConfigError("unknown kind '" + std::string(name) + "' (rc, sc)");
}

std::size_t label_count(Kind k, std::size_t n) { return k == Kind::RC ? n : n / 2 + 1; }

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    if (times_.empty()) throw ConfigError("time grid is empty");
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (!std::isfinite(times_[i])) throw ConfigError("time grid contains a non-finite value");
        if (times_[i] < 0.0) throw ConfigError("time grid contains negative time " + std::to_string(times_[i]));
        if (i > 0 && !(times_[i] > times_[i - 1])) throw ConfigError("time grid is not strictly increasing");
    }
}

bool TimeGrid::contains(double t) const noexcept {
    return std::binary_search(times_.begin(), times_.end(), t);
}

std::size_t TimeGrid::index_of(double t) const {
    auto it = std::lower_bound(times_.begin(), times_.end(), t);
    if (it == times_.end() || *it != t) throw LookupError("time " + std::to_string(t) + " is not on the grid");
    return static_cast<std::size_t>(it - times_.begin());
}

BrownianEnsemble sample_brownian_paths(std::size_t n_labels, const TimeGrid& grid, std::uint64_t seed) {
    if (n_labels < 1) throw ConfigError("n_labels must be at least 1");
    if (grid.size() == 0) throw ConfigError("time grid is empty");
    BrownianEnsemble ens{n_labels, grid, std::vector<double>(n_labels * grid.size())};
    NormalStream stream(seed);
    std::vector<double> scale(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) scale[k] = std::sqrt(grid[k] - (k ? grid[k - 1] : 0.0));
    double* out = ens.values.data();
    for (std::size_t label = 0; label < n_labels; ++label) {
        double b = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (scale[k] > 0.0) b += scale[k] * stream.normal();
            *out++ = b;
        }
    }
    return ens;
}

std::size_t sc_label(std::size_t n, std::size_t d) noexcept { return std::min(d, n - d); }

double CirculantSample::entry(std::size_t i, std::size_t j) const {
    if (kind == Kind::RC) return first_row[(i + j) % n];
    const std::size_t d = i > j ? i - j : j - i;
    return first_row[sc_label(n, d)];
}

CirculantSample make_circulant(Kind kind, std::size_t n, double t, std::vector<double> labels) {
    if (n < 1) throw ConfigError("matrix dimension must be positive");
    const std::size_t need = label_count(kind, n);
    if (labels.size() < need)
        throw ConfigError("dimension " + std::to_string(n) + " needs " + std::to_string(need) + " labels, have " +
                          std::to_string(labels.size()));
    labels.resize(need);
    CirculantSample s{kind, n, t, std::vector<double>(n), std::move(labels)};
    const double root = std::sqrt(static_cast<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t label = kind == Kind::RC ? j : sc_label(n, j);
        s.first_row[j] = s.labels[label] / root;
    }
    return s;
}

CirculantSample build_circulant(const BrownianEnsemble& ensemble, Kind kind, double t, std::size_t n) {
    const std::size_t ti = ensemble.grid.index_of(t);
    const std::size_t need = label_count(kind, n);
    if (need > ensemble.n_labels)
        throw ConfigError("dimension " + std::to_string(n) + " needs " + std::to_string(need) +
                          " labels but the ensemble has " + std::to_string(ensemble.n_labels));
    std::vector<double> labels(need);
    for (std::size_t j = 0; j < need; ++j) labels[j] = ensemble.value(j, ti);
    return make_circulant(kind, n, t, std::move(labels));
}

std::vector<double> dense_matrix(const CirculantSample& sample) {
    const std::size_t n = sample.n;
    std::vector<double> m(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i * n + j] = sample.entry(i, j);
    return m;
}

namespace {

class PlanCache {
public:
    ~PlanCache() {
        for (auto& kv : plans_) fftw_destroy_plan(kv.second);
    }

    fftw_plan get(std::size_t n) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = plans_.find(n);
        if (it != plans_.end()) return it->second;
        double* in = fftw_alloc_real(n);
        fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
        fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        plans_.emplace(n, plan);
        return plan;
    }

private:
    std::mutex mu_;
    std::map<std::size_t, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

}  // namespace

Spectrum spectrum(const CirculantSample& sample) {
    const std::size_t n = sample.n;
    if (n < 1 || sample.first_row.size() != n) throw ConfigError("invalid circulant sample");
    std::vector<double> in(sample.first_row);
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_execute_dft_r2c(plan_cache().get(n), in.data(), reinterpret_cast<fftw_complex*>(out.data()));

    Spectrum spec{sample.kind, n, std::vector<double>(n)};
    auto& lam = spec.eigenvalues;
    lam[0] = out[0].real();
    if (sample.kind == Kind::RC) {
        for (std::size_t k = 1; 2 * k < n; ++k) {
            const double mag = std::abs(out[k]);
            lam[k] = mag;
            lam[n - k] = -mag;
        }
        if (n % 2 == 0) lam[n / 2] = out[n / 2].real();
    } else {
        for (std::size_t k = 1; k <= n / 2; ++k) {
            lam[k] = out[k].real();
            lam[n - k] = out[k].real();
        }
    }
    return spec;
}

std::string_view to_string(TraceMethod m) {
    switch (m) {
        case TraceMethod::Auto: return "auto";
        case TraceMethod::Spectral: return "spectral";
        case TraceMethod::Dense: return "dense";
        case TraceMethod::Combinatorial: return "combinatorial";
    }
    return "?";
}

TraceMethod parse_trace_method(std::string_view name) {
    for (TraceMethod m : {TraceMethod::Auto, TraceMethod::Spectral, TraceMethod::Dense, TraceMethod::Combinatorial})
        if (name == to_string(m)) return m;
    throw ConfigError("unknown trace method '" + std::string(name) + "'");
}

TraceMethod resolve_trace_method(std::size_t n, unsigned p, TraceMethod requested) noexcept {
    if (requested != TraceMethod::Auto) return requested;
    return (n >= 64 || p >= 3) ? TraceMethod::Spectral : TraceMethod::Dense;
}

double power_sum(const Spectrum& spec, unsigned p) {
    CompensatedSum acc;
    for (double l : spec.eigenvalues) {
        double v = 1.0;
        for (unsigned e = 0; e < p; ++e) v *= l;
        acc += v;
    }
    return acc.value();
}

namespace {

double dense_trace(const CirculantSample& s, unsigned p) {
    const auto n = static_cast<Eigen::Index>(s.n);
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = s.entry(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    if (p == 0) return static_cast<double>(n);
    Eigen::MatrixXd acc = m;
    for (unsigned e = 1; e < p; ++e) acc = acc * m;
    return acc.trace();
}

double product_of(const std::vector<double>& x, std::span<const int> idx, std::size_t n) {
    double v = 1.0;
    for (int i : idx) v *= x[static_cast<std::size_t>(i) % n];
    return v;
}

double rc_combinatorial(const CirculantSample& s, unsigned p) {
    const std::size_t n = s.n;
    const auto& x = s.first_row;
    CompensatedSum acc;
    if (p % 2 == 0) {
        for_each_tuple(Family::A2p, static_cast<int>(n), {static_cast<int>(p), 0, 0},
                       [&](std::span<const int> idx, std::span<const int>) { acc += product_of(x, idx, n); });
        return static_cast<double>(n) * acc.value();
    }
    // Odd cycle: a_1 is fixed by 2a_1 ≡ i_1 - i_2 + ... + i_p (mod n).
    std::vector<int> idx(p, 0);
    while (true) {
        long long alt = 0;
        for (unsigned k = 0; k < p; ++k) alt += (k % 2 == 0 ? 1 : -1) * idx[k];
        long long r = alt % static_cast<long long>(n);
        if (r < 0) r += static_cast<long long>(n);
        int solutions = (n % 2 == 1) ? 1 : (r % 2 == 0 ? 2 : 0);
        if (solutions) acc += solutions * product_of(x, idx, n);
        int pos = static_cast<int>(p) - 1;
        while (pos >= 0 && idx[pos] == static_cast<int>(n) - 1) idx[pos--] = 0;
        if (pos < 0) break;
        ++idx[pos];
    }
    return acc.value();
}

double signed_family_sum(const CirculantSample& s, Family fam, unsigned k) {
    if (k == 0) return fam == Family::AkSC ? 1.0 : 0.0;
    CompensatedSum acc;
    for_each_tuple(fam, static_cast<int>(s.n), {static_cast<int>(k), 0, 0},
                   [&](std::span<const int> idx, std::span<const int>) { acc += product_of(s.first_row, idx, s.n); });
    return acc.value();
}

double sc_combinatorial(const CirculantSample& s, unsigned p) {
    const std::size_t n = s.n;
    const double x0 = s.first_row[0];
    CompensatedSum acc;
    if (n % 2 == 1) {
        for (unsigned k = 0; k <= p; ++k) {
            const double c = static_cast<double>(binomial(p, k));
            acc += c * std::pow(x0, static_cast<double>(p - k)) * signed_family_sum(s, Family::AkSC, k);
        }
        return static_cast<double>(n) * acc.value();
    }
    const double xh = s.first_row[n / 2];
    for (unsigned k = 0; k <= p; ++k) {
        const double c = static_cast<double>(binomial(p, k));
        const double plus = std::pow(x0 + xh, static_cast<double>(p - k));
        const double minus = std::pow(x0 - xh, static_cast<double>(p - k));
        acc += c * (plus + minus) * signed_family_sum(s, Family::AkSC, k);
        if (k > 0 && n >= 4) acc += c * (plus - minus) * signed_family_sum(s, Family::AtildeSC, k);
    }
    return 0.5 * static_cast<double>(n) * acc.value();
}

}  // namespace

double trace_power(const CirculantSample& sample, unsigned p, TraceMethod method) {
    switch (resolve_trace_method(sample.n, p, method)) {
        case TraceMethod::Spectral:
            return power_sum(spectrum(sample), p);
        case TraceMethod::Dense:
            return dense_trace(sample, p);
        case TraceMethod::Combinatorial:
            if (sample.n > kCombinatorialMaxN || p > kCombinatorialMaxP)
                throw CapacityError("combinatorial n<=" + std::to_string(kCombinatorialMaxN) + ", p<=" +
                                        std::to_string(kCombinatorialMaxP),
                                    "combinatorial trace requested for n=" + std::to_string(sample.n) +
                                        ", p=" + std::to_string(p));
            if (p == 0) return static_cast<double>(sample.n);
            return sample.kind == Kind::RC ? rc_combinatorial(sample, p) : sc_combinatorial(sample, p);
        case TraceMethod::Auto:
            break;
    }
    return 0.0;
}

}  // namespace circlab
