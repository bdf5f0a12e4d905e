#include "circlab/limit_theory.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "circlab/errors.hpp"
#include "circlab/numeric.hpp"
#include "trace_terms.hpp"

namespace circlab {

namespace {

void check_times(double t1, double t2) {
    if (!(t1 >= 0.0) || !std::isfinite(t2)) throw DomainError("times must be finite and non-negative");
    if (t1 > t2) throw DomainError("covariance query requires t1 <= t2");
}

double to_double(const Rational& r) { return r.convert_to<double>(); }
double to_double(const BigInt& r) { return r.convert_to<double>(); }

double ipow(double x, long long e) {
    double r = 1.0;
    for (long long i = 0; i < e; ++i) r *= x;
    return r;
}

// E[B(t)^k] for standard Brownian motion.
double bm_moment(unsigned k, double t) {
    if (k % 2) return 0.0;
    double r = 1.0;
    for (unsigned a = 2; a <= k; a += 2) r *= static_cast<double>(a - 1) * t;
    return r;
}

double factorial_d(unsigned k) { return to_double(factorial(k)); }

double rc_literal(const CovQuery& qy, TheoryMode mode) {
    const int p = static_cast<int>(qy.p), q = static_cast<int>(qy.q);
    CompensatedSum acc;
    for (int r = 1; r <= q; ++r) {
        Rational bracket = 0;
        for (int k = 1; k <= std::min(p, r); ++k) {
            const auto c = rc_constants(p, r, q, k, mode);
            bracket += c.c * c.g;
        }
        bracket -= rc_constants(p, r, q, 1, mode).c;
        acc += to_double(binomial(2 * q, 2 * r)) * ipow(qy.t1, p + r) * ipow(qy.t2 - qy.t1, q - r) *
               to_double(bracket);
    }
    return acc.value();
}

// 2·Cov(|Z(t1)|^{2p}, |Z(t2)|^{2q}) for a complex Brownian motion with E|Z(t)|^2 = t.
double rc_exact_limit(const CovQuery& qy) {
    const unsigned p = qy.p, q = qy.q;
    CompensatedSum acc;
    for (unsigned a = 1; a <= q; ++a) {
        const double c = to_double(binomial(q, a));
        const double weight = factorial_d(p + a) - factorial_d(p) * factorial_d(a);
        acc += c * c * factorial_d(q - a) * ipow(qy.t1, p + a) * ipow(qy.t2 - qy.t1, q - a) * weight;
    }
    return 2.0 * acc.value();
}

// Cov(B(t1)^p, B(t2)^q) by splitting B(t2) = B(t1) + independent increment.
double bm_power_cov(unsigned p, unsigned q, double t1, double t2) {
    CompensatedSum acc;
    for (unsigned a = 0; a <= q; ++a)
        acc += to_double(binomial(q, a)) * bm_moment(p + a, t1) * bm_moment(q - a, t2 - t1);
    return acc.value() - bm_moment(p, t1) * bm_moment(q, t2);
}

double sc_exact_limit(const CovQuery& qy) {
    const unsigned p = qy.p, q = qy.q;
    if ((p + q) % 2) return 0.0;
    return 2.0 * bm_power_cov(p, q, qy.t1, qy.t2) -
           qy.t1 * static_cast<double>(p * q) * bm_moment(p - 1, qy.t1) * bm_moment(q - 1, qy.t2);
}

Rational matching_sum(int len, int m_len) {
    // Σ_{s=0}^{len} C(len,s)^2 s!(len-s)! h_len(s)
    Rational total = 0;
    for (int s = 0; s <= len; ++s) {
        BigInt c = binomial(len, s);
        total += Rational(c * c * factorial(s) * factorial(len - s)) * h_pk(m_len, s);
    }
    return total;
}

double sc_literal(const CovQuery& qy) {
    const int p = static_cast<int>(qy.p), q = static_cast<int>(qy.q);
    const double t1 = qy.t1, dt = qy.t2 - qy.t1;
    if (p % 2 != q % 2) return 0.0;
    CompensatedSum acc;
    if (p % 2 == 0) {
        for (int r = 2; r <= q; r += 2) {
            double inner = 2.0 * to_double(sc_constants(p, q, r, 1, ScConstant::A)) * std::ldexp(1.0, -(p + q - 4) / 2);
            for (int m = 2; m <= std::min(p / 2, r / 2); ++m) {
                const double am = to_double(sc_constants(p, q, r, m, ScConstant::A));
                if (am == 0.0) continue;
                inner += am * std::ldexp(1.0, -(p + r - 4 * m) / 2) * to_double(matching_sum(2 * m, 2 * m));
            }
            acc += to_double(binomial(q, r)) * std::pow(t1, 0.5 * (p + r)) * std::pow(dt, 0.5 * (q - r)) * inner;
        }
        return acc.value();
    }
    for (int r = 1; r <= q; r += 2) {
        double inner = 0.0;
        for (int m = 0; m <= std::min((p - 1) / 2, (r - 1) / 2); ++m) {
            const double bm = to_double(sc_constants(p, q, r, m, ScConstant::B));
            if (bm == 0.0) continue;
            inner += bm * std::ldexp(1.0, -(p + r - 4 * m - 2) / 2) * to_double(matching_sum(2 * m + 1, 2 * m + 1));
        }
        acc += to_double(binomial(q, r)) * std::pow(t1, 0.5 * (p + r)) * std::pow(dt, 0.5 * (q - r)) * inner;
    }
    const double lead = static_cast<double>(p * q) * std::ldexp(1.0, -((p + q) / 2 - 1));
    for (int r = 0; r <= q - 1; r += 2) {
        acc += lead * to_double(binomial(q - 1, r)) * std::pow(t1, 0.5 * (p + 1 + r)) *
               std::pow(dt, 0.5 * (q - 1 - r)) * to_double(sc_constants(p, q, r, 0, ScConstant::D));
    }
    return acc.value();
}

}  // namespace

double rc_limit_cov(const CovQuery& qy, TheoryMode mode) {
    if (qy.kind != Kind::RC) throw KindError("rc_limit_cov needs an RC query");
    if (qy.p < 1 || qy.q < 1) throw DomainError("RC covariance requires p, q >= 1");
    check_times(qy.t1, qy.t2);
    return mode == TheoryMode::PaperLiteral ? rc_literal(qy, mode) : rc_exact_limit(qy);
}

double sc_limit_cov(const CovQuery& qy, TheoryMode mode) {
    if (qy.kind != Kind::SC) throw KindError("sc_limit_cov needs an SC query");
    check_times(qy.t1, qy.t2);
    if (mode == TheoryMode::PaperLiteral) {
        if (qy.p < 2 || qy.q < 2) throw DomainError("paper-literal SC covariance requires p, q >= 2");
        return sc_literal(qy);
    }
    if (qy.p < 1 || qy.q < 1) throw DomainError("SC covariance requires p, q >= 1");
    return sc_exact_limit(qy);
}

double limit_cov(const CovQuery& qy, TheoryMode mode) {
    return qy.kind == Kind::RC ? rc_limit_cov(qy, mode) : sc_limit_cov(qy, mode);
}

double wick_moment(const CovMatrix& cov, const std::vector<unsigned>& powers) {
    if (cov.values.size() != cov.dim * cov.dim || powers.size() != cov.dim)
        throw DomainError("wick_moment: covariance and powers disagree in dimension");
    const unsigned total = std::accumulate(powers.begin(), powers.end(), 0u);
    if (total > kWickMaxOrder)
        throw CapacityError("sum of powers<=" + std::to_string(kWickMaxOrder),
                            "wick_moment order " + std::to_string(total));
    if (total % 2) return 0.0;

    std::map<std::vector<unsigned>, double> memo;
    std::function<double(std::vector<unsigned>&)> rec = [&](std::vector<unsigned>& a) -> double {
        std::size_t i = 0;
        while (i < a.size() && a[i] == 0) ++i;
        if (i == a.size()) return 1.0;
        if (auto it = memo.find(a); it != memo.end()) return it->second;
        double r = 0.0;
        --a[i];
        if (a[i] >= 1) {
            const double c = cov(i, i);
            if (c != 0.0) {
                const double mult = static_cast<double>(a[i]);
                --a[i];
                r += mult * c * rec(a);
                ++a[i];
            }
        }
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            if (a[j] == 0 || cov(i, j) == 0.0) continue;
            const double mult = static_cast<double>(a[j]);
            --a[j];
            r += mult * cov(i, j) * rec(a);
            ++a[j];
        }
        ++a[i];
        memo.emplace(a, r);
        return r;
    };
    std::vector<unsigned> a = powers;
    return rec(a);
}

double gaussian_joint_moment(const std::vector<JointEntry>& entries, const PairCov& cov) {
    if (entries.empty()) throw DomainError("gaussian_joint_moment requires at least one entry");
    if (entries.size() % 2) return 0.0;
    std::vector<bool> used(entries.size(), false);
    std::function<double()> rec = [&]() -> double {
        std::size_t i = 0;
        while (i < used.size() && used[i]) ++i;
        if (i == used.size()) return 1.0;
        used[i] = true;
        double r = 0.0;
        for (std::size_t j = i + 1; j < used.size(); ++j) {
            if (used[j]) continue;
            used[j] = true;
            r += cov(entries[i], entries[j]) * rec();
            used[j] = false;
        }
        used[i] = false;
        return r;
    };
    return rec();
}

double exact_finite_n_cov(Kind kind, unsigned p, unsigned q, double t1, double t2, std::size_t n) {
    const unsigned cap = kind == Kind::RC ? kOracleMaxRcP : kOracleMaxScP;
    if (n > kOracleMaxN || p > cap || q > cap)
        throw CapacityError("n<=" + std::to_string(kOracleMaxN) + ", p,q<=" + std::to_string(cap),
                            "oracle requested for " + std::string(to_string(kind)) + " n=" + std::to_string(n) +
                                ", p=" + std::to_string(p) + ", q=" + std::to_string(q));
    if (p < 1 || q < 1 || n < 1) throw DomainError("oracle requires p, q, n >= 1");
    check_times(t1, t2);

    const unsigned dp = kind == Kind::RC ? 2 * p : p;
    const unsigned dq = kind == Kind::RC ? 2 * q : q;
    const auto poly1 = detail::trace_polynomial(kind, dp, n);
    const auto poly2 = detail::trace_polynomial(kind, dq, n);

    // Per-label joint moments of (b(t1), b(t2)).
    const CovMatrix bcov{2, {t1, t1, t1, t2}};
    std::vector<std::vector<double>> joint(dp + 1, std::vector<double>(dq + 1));
    for (unsigned a = 0; a <= dp; ++a)
        for (unsigned b = 0; b <= dq; ++b) joint[a][b] = wick_moment(bcov, {a, b});

    const std::size_t labels = label_count(kind, n);
    auto mean_of = [&](const detail::Exponents& e, bool first) {
        double m = 1.0;
        for (std::size_t l = 0; l < labels && m != 0.0; ++l)
            m *= first ? joint[e[l]][0] : joint[0][e[l]];
        return m;
    };
    struct Term {
        const detail::Exponents* exps;
        double coef;
        double mean;
    };
    std::vector<Term> terms2;
    for (const auto& [e, c] : poly2) terms2.push_back({&e, c, mean_of(e, false)});

    CompensatedSum acc;
    for (const auto& [e1, c1] : poly1) {
        const double m1 = mean_of(e1, true);
        for (const auto& t2 : terms2) {
            const auto& e2 = *t2.exps;
            double m12 = 1.0;
            for (std::size_t l = 0; l < labels && m12 != 0.0; ++l) m12 *= joint[e1[l]][e2[l]];
            const double diff = m12 - m1 * t2.mean;
            if (diff != 0.0) acc += c1 * t2.coef * diff;
        }
    }
    return acc.value() / static_cast<double>(n);
}

Extrapolation extrapolate_limit(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw DomainError("extrapolation needs at least 3 points");
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i].first > points[i - 1].first)) throw DomainError("extrapolation needs increasing n");
    const auto m = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd A(m, 2);
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!(points[i].first > 0.0)) throw DomainError("extrapolation needs positive n");
        A(i, 0) = 1.0;
        A(i, 1) = 1.0 / points[i].first;
        y(i) = points[i].second;
    }
    const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd res = A * coef - y;
    return {coef(0), coef(1), std::sqrt(res.squaredNorm() / static_cast<double>(m))};
}

}  // namespace circlab
