#include "trace_terms.hpp"

#include <cmath>

#include "circlab/combinatorics.hpp"
#include "circlab/errors.hpp"

namespace circlab::detail {

namespace {

void add_labels(Exponents& e, std::span<const int> idx, std::size_t n) {
    for (int i : idx) ++e[static_cast<std::size_t>(i) % n];
}

}  // namespace

void visit_trace_terms(Kind kind, unsigned power, std::size_t n, const TermVisitor& visit) {
    if (label_count(kind, n) > kMaxLabels) throw CapacityError("labels<=24", "trace expansion dimension too large");
    const double nd = static_cast<double>(n);
    const double scale = std::pow(nd, -0.5 * power);
    const int N = static_cast<int>(n);

    if (kind == Kind::RC) {
        if (power % 2 != 0) throw DomainError("RC trace expansion requires an even power");
        const double coef = nd * scale;
        for_each_tuple(Family::A2p, N, {static_cast<int>(power), 0, 0},
                       [&](std::span<const int> idx, std::span<const int>) {
                           Exponents e{};
                           add_labels(e, idx, n);
                           visit(coef, e);
                       });
        return;
    }

    for (unsigned k = 0; k <= power; ++k) {
        const double ck = static_cast<double>(binomial(power, k));
        const unsigned rest = power - k;
        auto over_family = [&](Family fam, const std::function<void(Exponents&, double)>& emit) {
            if (k == 0) {
                Exponents e{};
                emit(e, 1.0);
                return;
            }
            for_each_tuple(fam, N, {static_cast<int>(k), 0, 0}, [&](std::span<const int> idx, std::span<const int>) {
                Exponents e{};
                add_labels(e, idx, n);
                emit(e, 1.0);
            });
        };
        if (n % 2 == 1) {
            over_family(Family::AkSC, [&](Exponents& e, double) {
                e[0] += static_cast<std::uint8_t>(rest);
                visit(nd * ck * scale, e);
            });
            continue;
        }
        const std::size_t half = n / 2;
        // (X0 + Xh)^r ± (X0 - Xh)^r keeps even (resp. odd) powers of Xh, doubled.
        auto expand = [&](Exponents base, bool odd_h) {
            for (unsigned i = odd_h ? 1 : 0; i <= rest; i += 2) {
                Exponents e = base;
                e[0] += static_cast<std::uint8_t>(rest - i);
                e[half] += static_cast<std::uint8_t>(i);
                const double c = 0.5 * nd * ck * 2.0 * static_cast<double>(binomial(rest, i)) * scale;
                visit(c, e);
            }
        };
        over_family(Family::AkSC, [&](Exponents& e, double) { expand(e, false); });
        if (k > 0) over_family(Family::AtildeSC, [&](Exponents& e, double) { expand(e, true); });
    }
}

Polynomial trace_polynomial(Kind kind, unsigned power, std::size_t n) {
    Polynomial poly;
    visit_trace_terms(kind, power, n, [&](double c, const Exponents& e) { poly[e] += c; });
    for (auto it = poly.begin(); it != poly.end();) {
        if (it->second == 0.0) it = poly.erase(it);
        else ++it;
    }
    return poly;
}

}  // namespace circlab::detail
