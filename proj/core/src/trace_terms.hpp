#pragma once

// Monomial expansion of Tr(M^power) in the raw entry labels b_j.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <unordered_map>

#include "circlab/kind.hpp"

namespace circlab::detail {

inline constexpr std::size_t kMaxLabels = 24;
using Exponents = std::array<std::uint8_t, kMaxLabels>;

struct ExponentsHash {
    std::size_t operator()(const Exponents& e) const noexcept {
        std::uint64_t h = 1469598103934665603ULL;
        for (auto v : e) h = (h ^ v) * 1099511628211ULL;
        return static_cast<std::size_t>(h);
    }
};

using Polynomial = std::unordered_map<Exponents, double, ExponentsHash>;

using TermVisitor = std::function<void(double coef, const Exponents& exps)>;

// Visits coefficient/exponent pairs whose sum is Tr(M^power); repeated monomials are not merged.
void visit_trace_terms(Kind kind, unsigned power, std::size_t n, const TermVisitor& visit);

Polynomial trace_polynomial(Kind kind, unsigned power, std::size_t n);

}  // namespace circlab::detail
