#include "circlab/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "circlab/errors.hpp"

namespace circlab {

namespace {

long long floor_mod(long long a, long long m) {
    const long long r = a % m;
    return r < 0 ? r + m : r;
}

long long ceil_div2(long long x) { return x >= 0 ? (x + 1) / 2 : -((-x) / 2); }
long long floor_div2(long long x) { return x >= 0 ? x / 2 : -((-x + 1) / 2); }

void require_positive_n(int n) {
    if (n < 1) throw DomainError("modulus n must be positive, got " + std::to_string(n));
}

// Sign attached to position i (0-based) by the family's fixed sign pattern.
int fixed_sign(Family f, int i, const FamilyParams& params) {
    switch (f) {
        case Family::A2p:
        case Family::A2ps:
            return (i % 2 == 0) ? -1 : 1;
        case Family::Apk:
            return i < params.k ? 1 : -1;
        default:
            return 1;
    }
}

bool accept(Family f, int n, const FamilyParams& params, long long sum) {
    switch (f) {
        case Family::A2p:
        case Family::AkSC:
        case Family::Apk:
            return floor_mod(sum, n) == 0;
        case Family::A2ps:
            return sum == static_cast<long long>(params.s) * n;
        case Family::AtildeSC:
            return floor_mod(sum, n / 2) == 0 && floor_mod(sum, n) != 0;
    }
    return false;
}

void validate(Family f, int n, const FamilyParams& params) {
    require_positive_n(n);
    if (params.length < 0) throw DomainError("tuple length must be non-negative");
    if ((f == Family::A2p || f == Family::A2ps) && params.length % 2 != 0)
        throw DomainError(std::string(to_string(f)) + " requires an even tuple length");
    if (f == Family::AtildeSC && n % 2 != 0) throw DomainError("atilde_sc requires even n");
    if (f == Family::Apk && (params.k < 0 || params.k > params.length))
        throw DomainError("apk requires 0 <= k <= p");
}

void check_cost(double cost, const EnumLimits& limits, std::string_view what) {
    if (cost > limits.max_cost)
        throw CapacityError("max_cost=" + std::to_string(static_cast<long long>(limits.max_cost)),
                            std::string(what) + " cost " + std::to_string(cost) + " exceeds the enumeration cap");
}

}  // namespace

std::string_view to_string(Family f) {
    switch (f) {
        case Family::A2p: return "a2p";
        case Family::A2ps: return "a2ps";
        case Family::AkSC: return "ak_sc";
        case Family::AtildeSC: return "atilde_sc";
        case Family::Apk: return "apk";
    }
    return "?";
}

Family parse_family(std::string_view name) {
    for (Family f : {Family::A2p, Family::A2ps, Family::AkSC, Family::AtildeSC, Family::Apk})
        if (name == to_string(f)) return f;
    throw ConfigError("unknown family '" + std::string(name) + "' (a2p, a2ps, ak_sc, atilde_sc, apk)");
}

bool is_signed(Family f) { return f == Family::AkSC || f == Family::AtildeSC; }

int index_upper(Family f, int n) {
    switch (f) {
        case Family::A2p:
        case Family::A2ps:
            return n;
        case Family::AkSC:
        case Family::AtildeSC:
            return (n - 1) / 2;
        case Family::Apk:
            return n / 2;
    }
    return 0;
}

void for_each_tuple(Family f, int n, const FamilyParams& params, const TupleVisitor& visit,
                    const EnumLimits& limits) {
    validate(f, n, params);
    const int len = params.length;
    const int upper = index_upper(f, n);
    const bool sgn = is_signed(f);
    double cost = std::pow(static_cast<double>(upper), len) * (sgn ? std::pow(2.0, len) : 1.0);
    check_cost(cost, limits, std::string(to_string(f)) + " enumeration");
    if (len > 0 && upper < 1) return;

    std::vector<int> idx(len, 1);
    std::vector<int> signs(sgn ? len : 0);
    const unsigned long long patterns = sgn ? (1ULL << len) : 1ULL;
    while (true) {
        for (unsigned long long pat = 0; pat < patterns; ++pat) {
            long long sum = 0;
            for (int i = 0; i < len; ++i) {
                int e;
                if (sgn) {
                    e = ((pat >> (len - 1 - i)) & 1ULL) ? 1 : -1;
                    signs[i] = e;
                } else {
                    e = fixed_sign(f, i, params);
                }
                sum += static_cast<long long>(e) * idx[i];
            }
            if (accept(f, n, params, sum)) visit(idx, signs);
        }
        int pos = len - 1;
        while (pos >= 0 && idx[pos] == upper) idx[pos--] = 1;
        if (pos < 0) break;
        ++idx[pos];
    }
}

std::vector<ConstraintTuple> enumerate(Family f, int n, const FamilyParams& params, const EnumLimits& limits) {
    std::vector<ConstraintTuple> out;
    for_each_tuple(
        f, n, params,
        [&](std::span<const int> idx, std::span<const int> sg) {
            out.push_back({{idx.begin(), idx.end()}, {sg.begin(), sg.end()}, f, n});
        },
        limits);
    return out;
}

std::uint64_t count_tuples(Family f, int n, const FamilyParams& params, const EnumLimits& limits) {
    validate(f, n, params);
    const int len = params.length;
    const int upper = index_upper(f, n);
    const bool sgn = is_signed(f);
    if (len == 0) return accept(f, n, params, 0) ? 1 : 0;
    if (upper < 1) return 0;

    const int free_len = len - 1;
    double cost = std::pow(static_cast<double>(upper), free_len) * (sgn ? std::pow(2.0, free_len) : 1.0);
    check_cost(cost, limits, std::string(to_string(f)) + " count");

    // Number of completions of the last slot given the partial signed sum.
    auto completions = [&](long long partial) -> std::uint64_t {
        std::uint64_t c = 0;
        if (sgn) {
            for (int e : {-1, 1}) {
                long long j;
                if (f == Family::AkSC) {
                    j = floor_mod(-e * partial, n);
                } else {
                    j = floor_mod(-e * partial, n / 2);
                }
                if (j >= 1 && j <= upper && accept(f, n, params, partial + e * j)) ++c;
            }
            return c;
        }
        const int e = fixed_sign(f, len - 1, params);
        if (f == Family::A2ps) {
            const long long j = e * (static_cast<long long>(params.s) * n - partial);
            return (j >= 1 && j <= upper) ? 1 : 0;
        }
        long long j = floor_mod(-e * partial, n);
        if (j == 0) j = n;
        return (j >= 1 && j <= upper) ? 1 : 0;
    };

    std::uint64_t total = 0;
    std::vector<int> idx(free_len, 1);
    const unsigned long long patterns = sgn ? (1ULL << free_len) : 1ULL;
    while (true) {
        for (unsigned long long pat = 0; pat < patterns; ++pat) {
            long long sum = 0;
            for (int i = 0; i < free_len; ++i) {
                const int e = sgn ? (((pat >> i) & 1ULL) ? 1 : -1) : fixed_sign(f, i, params);
                sum += static_cast<long long>(e) * idx[i];
            }
            total += completions(sum);
        }
        int pos = free_len - 1;
        while (pos >= 0 && idx[pos] == upper) idx[pos--] = 1;
        if (pos < 0) break;
        ++idx[pos];
    }
    return total;
}

BigInt binomial(long long x, long long y) {
    if (y < 0 || y > x) return 0;
    y = std::min(y, x - y);
    BigInt r = 1;
    for (long long i = 1; i <= y; ++i) {
        r *= (x - y + i);
        r /= i;
    }
    return r;
}

BigInt factorial(long long x) {
    if (x < 0) throw DomainError("factorial of negative argument " + std::to_string(x));
    BigInt r = 1;
    for (long long i = 2; i <= x; ++i) r *= i;
    return r;
}

BigInt card_A2ps(int n, int p, int s) {
    require_positive_n(n);
    if (p < 1) throw DomainError("card_A2ps requires p >= 1");
    if (s < -(p - 1) || s > p - 1)
        throw DomainError("card_A2ps requires -(p-1) <= s <= p-1, got s=" + std::to_string(s));
    BigInt total = 0;
    for (long long k = 0; k <= p + s - 1; ++k) {
        BigInt term = binomial(2 * p, k) * binomial((p + s - k) * static_cast<long long>(n) + p - 1, 2 * p - 1);
        if (k % 2) total -= term;
        else total += term;
    }
    return total;
}

namespace {

Rational rational_pow(const Rational& x, int e) {
    Rational r = 1;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

}  // namespace

Rational h_pk(int p, int k) {
    if (p < 1) throw DomainError("h_pk requires p >= 1");
    if (k < 0 || k > p) throw DomainError("h_pk requires 0 <= k <= p");
    const long long lo = -ceil_div2(p - k);
    const long long hi = floor_div2(k);
    Rational total = 0;
    for (long long s = lo; s <= hi; ++s) {
        for (long long q = 0; q <= 2 * s + p - k; ++q) {
            Rational base(BigInt(2 * s + p - k - q), BigInt(2));
            Rational term = Rational(binomial(p, q)) * rational_pow(base, p - 1);
            if (q % 2) total -= term;
            else total += term;
        }
    }
    return total / Rational(factorial(p - 1));
}

bool is_odd_even_pair_matched(std::span<const int> indices) {
    std::map<int, std::pair<int, int>> seen;  // value -> (odd count, even count)
    for (std::size_t i = 0; i < indices.size(); ++i) {
        auto& c = seen[indices[i]];
        if ((i + 1) % 2) ++c.first;
        else ++c.second;
    }
    return std::all_of(seen.begin(), seen.end(),
                       [](const auto& kv) { return kv.second.first == 1 && kv.second.second == 1; });
}

bool is_opposite_sign_pair_matched(std::span<const int> indices, std::span<const int> signs) {
    if (indices.size() != signs.size())
        throw DomainError("indices and signs differ in length (" + std::to_string(indices.size()) + " vs " +
                          std::to_string(signs.size()) + ")");
    std::map<int, std::pair<int, int>> seen;  // value -> (plus count, minus count)
    for (std::size_t i = 0; i < indices.size(); ++i) {
        auto& c = seen[indices[i]];
        if (signs[i] > 0) ++c.first;
        else ++c.second;
    }
    return std::all_of(seen.begin(), seen.end(),
                       [](const auto& kv) { return kv.second.first == 1 && kv.second.second == 1; });
}

std::string_view to_string(TheoryMode m) {
    return m == TheoryMode::PaperLiteral ? "paper-literal" : "reconciled";
}

TheoryMode parse_mode(std::string_view name) {
    if (name == "paper-literal" || name == "paper" || name == "literal") return TheoryMode::PaperLiteral;
    if (name == "reconciled") return TheoryMode::Reconciled;
    throw ConfigError("unknown theory mode '" + std::string(name) + "' (paper-literal, reconciled)");
}

Rational rc_g(int k, TheoryMode mode) {
    if (k < 1) throw DomainError("g(k) requires k >= 1");
    if (mode == TheoryMode::Reconciled && k == 1) return 3;
    const BigInt kf = factorial(k);
    Rational total = 0;
    for (long long s = -(k - 1); s <= k - 1; ++s) {
        const BigInt weight = (s == 0 ? 1 : 2) * kf * kf;
        for (long long j = 0; j <= k + s - 1; ++j) {
            BigInt power = 1;
            for (int e = 0; e < 2 * k - 1; ++e) power *= (k + s - j);
            BigInt term = binomial(2 * k, j) * power * weight;
            if (j % 2) total -= Rational(term);
            else total += Rational(term);
        }
    }
    return total / Rational(factorial(2 * k - 1));
}

RcConstants rc_constants(int p, int r_prime, int q, int k, TheoryMode mode) {
    if (p < 1 || q < 1 || r_prime < 1 || r_prime > q)
        throw DomainError("rc_constants requires p, q >= 1 and 1 <= r' <= q");
    if (k < 1 || k > std::min(p, r_prime))
        throw DomainError("rc_constants requires 1 <= k <= min(p, r')");
    auto block = [](long long a, long long b) {
        BigInt c = binomial(a, b);
        return c * c * factorial(b);
    };
    BigInt c = block(p, p - k) * block(r_prime, r_prime - k) * block(q, q - r_prime);
    return {Rational(c), rc_g(k, mode)};
}

ScConstant parse_sc_constant(std::string_view name) {
    if (name == "a") return ScConstant::A;
    if (name == "b") return ScConstant::B;
    if (name == "d") return ScConstant::D;
    if (name == "a~" || name == "atilde") return ScConstant::ATilde;
    if (name == "b~" || name == "btilde") return ScConstant::BTilde;
    if (name == "d~" || name == "dtilde") return ScConstant::DTilde;
    throw ConfigError("unknown SC constant '" + std::string(name) + "'");
}

namespace {

// C(c, c/2)·(c/2)!, zero for negative c.
BigInt half_block(long long c) {
    if (c < 0) return 0;
    BigInt b = binomial(c, c / 2);
    if (b == 0) return 0;
    return b * factorial(c / 2);
}

// C(a, c)·C(c, c/2)·(c/2)!.
BigInt pair_block(long long a, long long c) {
    BigInt b = binomial(a, c);
    if (b == 0) return 0;
    return b * half_block(c);
}

}  // namespace

Rational sc_constants(int p, int q, int r, int m, ScConstant which) {
    if (which == ScConstant::ATilde || which == ScConstant::BTilde || which == ScConstant::DTilde) q = p;
    auto even = [](int x) { return x % 2 == 0; };
    switch (which) {
        case ScConstant::A:
        case ScConstant::ATilde: {
            if (!(even(p) && even(q) && even(r)))
                throw DomainError("a_m requires p, q, r all even");
            return Rational(pair_block(p, p - 2LL * m) * pair_block(r, r - 2LL * m) * pair_block(q, q - 2LL * r));
        }
        case ScConstant::B:
        case ScConstant::BTilde: {
            if (even(p) || even(q) || even(r))
                throw DomainError("b_m requires p, q, r all odd");
            return Rational(pair_block(p, p - 2LL * m - 1) * pair_block(r, r - 2LL * m - 1) *
                            pair_block(q, q - 2LL * r - 1));
        }
        case ScConstant::D:
        case ScConstant::DTilde: {
            if (even(p) || even(q) || !even(r))
                throw DomainError("d_r requires p, q odd and r even");
            return Rational(half_block(p - 1) * half_block(r) * half_block(q - r - 1LL));
        }
    }
    return 0;
}

ClusterPartition cluster_decompose(const std::vector<std::vector<int>>& tuples) {
    std::vector<std::size_t> parent(tuples.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::map<int, std::size_t> owner;
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        for (int v : tuples[i]) {
            auto [it, fresh] = owner.emplace(v, i);
            if (!fresh) {
                std::size_t a = find(it->second), b = find(i);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
        }
    }
    ClusterPartition blocks;
    std::map<std::size_t, std::size_t> slot;
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        const std::size_t root = find(i);
        auto [it, fresh] = slot.emplace(root, blocks.size());
        if (fresh) blocks.emplace_back();
        blocks[it->second].push_back(i);
    }
    return blocks;
}

std::uint64_t count_B_Pl(int n, const std::vector<int>& lengths, Kind kind, const EnumLimits& limits) {
    require_positive_n(n);
    if (lengths.empty()) throw DomainError("count_B_Pl requires at least one tuple length");
    std::vector<std::vector<std::vector<int>>> lists;
    double cost = 1.0;
    for (int len : lengths) {
        const Family fam = kind == Kind::RC ? Family::A2p : Family::AkSC;
        std::vector<std::vector<int>> list;
        for (const auto& t : enumerate(fam, n, {len, 0, 0}, limits)) list.push_back(t.indices);
        cost *= static_cast<double>(std::max<std::size_t>(list.size(), 1));
        lists.push_back(std::move(list));
    }
    check_cost(cost, limits, "count_B_Pl product");
    for (const auto& l : lists)
        if (l.empty()) return 0;

    const std::size_t ell = lists.size();
    std::vector<std::size_t> pick(ell, 0);
    std::vector<std::vector<int>> chosen(ell);
    std::uint64_t count = 0;
    while (true) {
        std::map<int, int> mult;
        for (std::size_t i = 0; i < ell; ++i) {
            chosen[i] = lists[i][pick[i]];
            for (int v : chosen[i]) ++mult[v];
        }
        const bool all_repeated =
            std::all_of(mult.begin(), mult.end(), [](const auto& kv) { return kv.second >= 2; });
        if (all_repeated && cluster_decompose(chosen).size() == 1) ++count;
        std::size_t pos = ell;
        while (pos > 0) {
            --pos;
            if (++pick[pos] < lists[pos].size()) break;
            pick[pos] = 0;
            if (pos == 0) return count;
        }
    }
}

}  // namespace circlab
