#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "circlab/kind.hpp"

namespace circlab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Constraint families over index tuples modulo n.
//   A2p       Σ(-1)^k i_k ≡ 0 (mod n), 1 ≤ i ≤ n
//   A2ps      Σ(-1)^k i_k = s·n exactly
//   AkSC      Σ ε_i j_i ≡ 0 (mod n), signed, 1 ≤ j < n/2
//   AtildeSC  Σ ε_i j_i ≡ 0 (mod n/2) but not (mod n), signed, 1 ≤ j < n/2, n even
//   Apk       j_1+…+j_k − j_{k+1}−…−j_p ≡ 0 (mod n), 1 ≤ j ≤ n/2
enum class Family { A2p, A2ps, AkSC, AtildeSC, Apk };

std::string_view to_string(Family f);
Family parse_family(std::string_view name);
bool is_signed(Family f);

struct ConstraintTuple {
    std::vector<int> indices;
    std::vector<int> signs;  // empty for unsigned families
    Family family = Family::A2p;
    int modulus = 0;
};

// length: tuple length (2p for A2p/A2ps, k for SC families, p for Apk).
// s: A2ps offset. k: Apk split point.
struct FamilyParams {
    int length = 0;
    int s = 0;
    int k = 0;
};

struct EnumLimits {
    double max_cost = 1e8;
};

// Callback receives indices and signs (signs empty for unsigned families).
using TupleVisitor = std::function<void(std::span<const int>, std::span<const int>)>;

void for_each_tuple(Family family, int n, const FamilyParams& params, const TupleVisitor& visit,
                    const EnumLimits& limits = {});

std::vector<ConstraintTuple> enumerate(Family family, int n, const FamilyParams& params,
                                       const EnumLimits& limits = {});

// Count without materializing; the last index is solved rather than scanned.
std::uint64_t count_tuples(Family family, int n, const FamilyParams& params,
                           const EnumLimits& limits = {});

// Largest admissible index value for the family at dimension n.
int index_upper(Family family, int n);

BigInt binomial(long long x, long long y);
BigInt factorial(long long x);

BigInt card_A2ps(int n, int p, int s);

Rational h_pk(int p, int k);

bool is_odd_even_pair_matched(std::span<const int> indices);
bool is_opposite_sign_pair_matched(std::span<const int> indices, std::span<const int> signs);

enum class TheoryMode { PaperLiteral, Reconciled };
std::string_view to_string(TheoryMode m);
TheoryMode parse_mode(std::string_view name);

struct RcConstants {
    Rational c;
    Rational g;
};

RcConstants rc_constants(int p, int r_prime, int q, int k, TheoryMode mode);
Rational rc_g(int k, TheoryMode mode);

enum class ScConstant { A, B, D, ATilde, BTilde, DTilde };
ScConstant parse_sc_constant(std::string_view name);

Rational sc_constants(int p, int q, int r, int m, ScConstant which);

// Blocks of positions into the input list; blocks ordered by their first member.
using ClusterPartition = std::vector<std::vector<std::size_t>>;
ClusterPartition cluster_decompose(const std::vector<std::vector<int>>& tuples);

std::uint64_t count_B_Pl(int n, const std::vector<int>& lengths, Kind kind,
                         const EnumLimits& limits = {});

}  // namespace circlab
