#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "circlab/ensemble.hpp"

namespace circlab {

enum class Centering { Empirical, Exact };
std::string_view to_string(Centering c);
Centering parse_centering(std::string_view name);

// Per-replica fluctuation values on a grid. RC series hold w_p (trace power 2p),
// SC series hold eta_p (trace power p). values is replica-major.
struct FluctuationSeries {
    Kind kind = Kind::RC;
    unsigned p = 1;
    TimeGrid grid;
    std::size_t replicas = 0;
    std::vector<double> values;
    Centering centering = Centering::Empirical;

    double at(std::size_t replica, std::size_t time_index) const {
        return values[replica * grid.size() + time_index];
    }
};

// Trace power associated with order p: 2p for RC, p for SC.
unsigned trace_degree(Kind kind, unsigned p) noexcept;

// (Tr - center)/sqrt(n) for RC traces of power 2p.
std::vector<double> rc_fluctuation(std::span<const double> traces, unsigned p, double t, std::size_t n,
                                   Centering centering);

// (Tr - center)/sqrt(n) for SC traces of power p.
std::vector<double> sc_fluctuation(std::span<const double> traces, unsigned p, double t, std::size_t n,
                                   Centering centering);

// eta_1 under exact centering is b_0(t) itself.
double eta1_exact(const CirculantSample& sample);

double rc_odd_statistic(const Spectrum& spec, unsigned p, double t);

inline constexpr std::size_t kExpectationMaxN = 16;
inline constexpr unsigned kExpectationMaxRcP = 3;
inline constexpr unsigned kExpectationMaxScP = 6;

// E[Tr(M(t))^power] with power 2p (RC) or p (SC).
double exact_trace_expectation(Kind kind, unsigned p, double t, std::size_t n);

}  // namespace circlab
