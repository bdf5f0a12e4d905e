#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "circlab/kind.hpp"

namespace circlab {

class TimeGrid {
public:
    TimeGrid() = default;
    // Throws ConfigError unless times are nonempty, finite, strictly increasing and start at >= 0.
    explicit TimeGrid(std::vector<double> times);

    const std::vector<double>& times() const noexcept { return times_; }
    std::size_t size() const noexcept { return times_.size(); }
    double operator[](std::size_t i) const { return times_[i]; }

    bool contains(double t) const noexcept;
    // Throws LookupError when t is not a grid point.
    std::size_t index_of(double t) const;

private:
    std::vector<double> times_;
};

// n_labels independent paths on a grid, stored label-major.
struct BrownianEnsemble {
    std::size_t n_labels = 0;
    TimeGrid grid;
    std::vector<double> values;

    double value(std::size_t label, std::size_t time_index) const {
        return values[label * grid.size() + time_index];
    }
};

BrownianEnsemble sample_brownian_paths(std::size_t n_labels, const TimeGrid& grid, std::uint64_t seed);

struct CirculantSample {
    Kind kind = Kind::RC;
    std::size_t n = 0;
    double t = 0.0;
    std::vector<double> first_row;  // already scaled by 1/sqrt(n)
    std::vector<double> labels;     // raw b_j(t), j < label_count(kind, n)

    // 0-based entry (i, j).
    double entry(std::size_t i, std::size_t j) const;
};

// Position of first-row entry d for the SC index law: min(d, n - d).
std::size_t sc_label(std::size_t n, std::size_t d) noexcept;

CirculantSample build_circulant(const BrownianEnsemble& ensemble, Kind kind, double t, std::size_t n);
CirculantSample make_circulant(Kind kind, std::size_t n, double t, std::vector<double> labels);

// Row-major n x n matrix.
std::vector<double> dense_matrix(const CirculantSample& sample);

struct Spectrum {
    Kind kind = Kind::RC;
    std::size_t n = 0;
    std::vector<double> eigenvalues;
};

Spectrum spectrum(const CirculantSample& sample);

enum class TraceMethod { Auto, Spectral, Dense, Combinatorial };
std::string_view to_string(TraceMethod m);
TraceMethod parse_trace_method(std::string_view name);

// Auto resolves to Spectral when n >= 64 or p >= 3, Dense otherwise.
TraceMethod resolve_trace_method(std::size_t n, unsigned p, TraceMethod requested) noexcept;

inline constexpr std::size_t kCombinatorialMaxN = 16;
inline constexpr unsigned kCombinatorialMaxP = 4;

double trace_power(const CirculantSample& sample, unsigned p, TraceMethod method = TraceMethod::Auto);
double power_sum(const Spectrum& spec, unsigned p);

}  // namespace circlab
