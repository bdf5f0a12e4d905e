#include "circlab/fluctuations.hpp"

#include <cmath>
#include <string>

#include "circlab/errors.hpp"
#include "circlab/numeric.hpp"
#include "trace_terms.hpp"

namespace circlab {

std::string_view to_string(Centering c) { return c == Centering::Empirical ? "empirical" : "exact"; }

Centering parse_centering(std::string_view name) {
    if (name == "empirical") return Centering::Empirical;
    if (name == "exact") return Centering::Exact;
    throw ConfigError("unknown centering '" + std::string(name) + "' (empirical, exact)");
}

unsigned trace_degree(Kind kind, unsigned p) noexcept { return kind == Kind::RC ? 2 * p : p; }

namespace {

std::vector<double> center_and_scale(std::span<const double> traces, Kind kind, unsigned p, double t, std::size_t n,
                                     Centering centering) {
    if (p < 1) throw ConfigError("order p must be at least 1");
    if (n < 1) throw ConfigError("dimension n must be positive");
    double center = 0.0;
    if (centering == Centering::Empirical) {
        if (traces.size() < 2) throw ConfigError("empirical centering needs at least 2 replicas");
        CompensatedSum acc;
        for (double v : traces) acc += v;
        center = acc.value() / static_cast<double>(traces.size());
    } else {
        center = exact_trace_expectation(kind, p, t, n);
    }
    const double root = std::sqrt(static_cast<double>(n));
    std::vector<double> out(traces.size());
    for (std::size_t r = 0; r < traces.size(); ++r) out[r] = (traces[r] - center) / root;
    return out;
}

}  // namespace

std::vector<double> rc_fluctuation(std::span<const double> traces, unsigned p, double t, std::size_t n,
                                   Centering centering) {
    return center_and_scale(traces, Kind::RC, p, t, n, centering);
}

std::vector<double> sc_fluctuation(std::span<const double> traces, unsigned p, double t, std::size_t n,
                                   Centering centering) {
    return center_and_scale(traces, Kind::SC, p, t, n, centering);
}

double eta1_exact(const CirculantSample& sample) {
    if (sample.kind != Kind::SC) throw KindError("eta_1 identity applies to SC samples");
    return sample.labels.at(0);
}

double rc_odd_statistic(const Spectrum& spec, unsigned p, double /*t*/) {
    if (spec.kind != Kind::RC) throw KindError("odd statistic is defined for RC spectra only");
    return power_sum(spec, 2 * p + 1);
}

double exact_trace_expectation(Kind kind, unsigned p, double t, std::size_t n) {
    const unsigned cap_p = kind == Kind::RC ? kExpectationMaxRcP : kExpectationMaxScP;
    if (n > kExpectationMaxN || p > cap_p)
        throw CapacityError("n<=" + std::to_string(kExpectationMaxN) + ", p<=" + std::to_string(cap_p),
                            "exact expectation requested for " + std::string(to_string(kind)) +
                                " n=" + std::to_string(n) + ", p=" + std::to_string(p));
    if (p < 1) throw ConfigError("order p must be at least 1");
    if (t < 0.0) throw DomainError("time must be non-negative");
    const unsigned power = trace_degree(kind, p);

    // Univariate Isserlis: E[b^a] = (a-1)!! t^{a/2} for even a, 0 otherwise.
    std::vector<double> moment(power + 1, 0.0);
    moment[0] = 1.0;
    for (unsigned a = 2; a <= power; a += 2) moment[a] = moment[a - 2] * static_cast<double>(a - 1) * t;

    CompensatedSum acc;
    detail::visit_trace_terms(kind, power, n, [&](double coef, const detail::Exponents& e) {
        double m = coef;
        for (auto a : e) {
            if (a == 0) continue;
            m *= moment[a];
            if (m == 0.0) return;
        }
        acc += m;
    });
    return acc.value();
}

}  // namespace circlab
