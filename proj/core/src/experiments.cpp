#include "circlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "circlab/errors.hpp"
#include "circlab/limit_theory.hpp"
#include "circlab/numeric.hpp"
#include "circlab/rng.hpp"

namespace circlab {

std::string format_double(double v, int digits) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    std::string s(buf);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::NotApplicable: return "not-applicable";
    }
    return "?";
}

Verdict judge(double empirical, double reference, double se, double tolerance) {
    if (std::isnan(empirical) || std::isnan(reference) || std::isnan(se)) return Verdict::NotApplicable;
    return std::fabs(empirical - reference) <= tolerance * se ? Verdict::Pass : Verdict::Fail;
}

void ExperimentConfig::validate() const {
    if (orders.empty()) throw ConfigError("at least one order is required");
    if (orders.size() != times.size())
        throw ConfigError("orders and times must have the same length (" + std::to_string(orders.size()) + " vs " +
                          std::to_string(times.size()) + ")");
    for (unsigned p : orders)
        if (p < 1) throw ConfigError("orders must be >= 1");
    for (double t : times)
        if (!std::isfinite(t) || t < 0.0) throw ConfigError("times must be finite and non-negative");
    if (n < 2) throw ConfigError("n must be at least 2");
    if (replicas < 2) throw ConfigError("replicas must be at least 2");
    if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
    if (centering == Centering::Exact) {
        for (unsigned p : orders) {
            if (kind == Kind::SC && p == 1) continue;
            const unsigned cap = kind == Kind::RC ? kExpectationMaxRcP : kExpectationMaxScP;
            if (n > kExpectationMaxN || p > cap)
                throw CapacityError("n<=" + std::to_string(kExpectationMaxN) + ", p<=" + std::to_string(cap),
                                    "exact centering unavailable for n=" + std::to_string(n) +
                                        ", p=" + std::to_string(p));
        }
    }
    if (method == TraceMethod::Combinatorial) {
        for (unsigned p : orders)
            if (n > kCombinatorialMaxN || trace_degree(kind, p) > kCombinatorialMaxP)
                throw CapacityError("combinatorial n<=" + std::to_string(kCombinatorialMaxN) + ", power<=" +
                                        std::to_string(kCombinatorialMaxP),
                                    "combinatorial trace method out of range");
    }
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream os;
    os << "id=" << id << ";kind=" << to_string(kind) << ";orders=";
    for (std::size_t i = 0; i < orders.size(); ++i) os << (i ? "," : "") << orders[i];
    os << ";times=";
    for (std::size_t i = 0; i < times.size(); ++i) os << (i ? "," : "") << format_double(times[i]);
    os << ";n=" << n << ";replicas=" << replicas << ";seed=" << seed << ";centering=" << to_string(centering)
       << ";theory=" << to_string(theory_mode) << ";tolerance=" << format_double(tolerance)
       << ";method=" << to_string(method);
    return os.str();
}

std::string ExperimentConfig::hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canonical()) h = (h ^ c) * 1099511628211ULL;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

unsigned resolve_workers(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Runs body(r) for r in [0, R) over contiguous chunks; each r is written by exactly one worker.
void parallel_replicas(std::size_t R, unsigned workers, const std::function<void(std::size_t)>& body) {
    workers = static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(R, 1)));
    if (workers <= 1) {
        for (std::size_t r = 0; r < R; ++r) body(r);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    const std::size_t chunk = (R + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::size_t lo = w * chunk, hi = std::min(R, lo + chunk);
                for (std::size_t r = lo; r < hi; ++r) body(r);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

Estimate batch_mean_estimate(const std::vector<double>& z, double scale) {
    const std::size_t R = z.size();
    const auto B = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(R))));
    CompensatedSum total;
    for (double v : z) total += v;
    const double value = total.value() * scale;
    if (B < 2) return {value, kNaN};
    std::vector<double> means(B);
    for (std::size_t b = 0; b < B; ++b) {
        const std::size_t lo = b * R / B, hi = (b + 1) * R / B;
        CompensatedSum acc;
        for (std::size_t r = lo; r < hi; ++r) acc += z[r];
        means[b] = acc.value() / static_cast<double>(hi - lo);
    }
    CompensatedSum mm;
    for (double m : means) mm += m;
    const double mbar = mm.value() / static_cast<double>(B);
    CompensatedSum ss;
    for (double m : means) ss += (m - mbar) * (m - mbar);
    const double sd = std::sqrt(ss.value() / static_cast<double>(B - 1));
    const double per_replica_scale = scale * static_cast<double>(R);
    return {value, per_replica_scale * sd / std::sqrt(static_cast<double>(B))};
}

double column_mean(const std::vector<double>& x) {
    CompensatedSum acc;
    for (double v : x) acc += v;
    return acc.value() / static_cast<double>(x.size());
}

}  // namespace

Estimate estimate_joint_moment(const std::vector<std::vector<double>>& columns) {
    if (columns.empty()) throw DomainError("joint moment needs at least one column");
    const std::size_t R = columns.front().size();
    for (const auto& c : columns)
        if (c.size() != R) throw DomainError("joint moment columns differ in length");
    if (R < 2) throw ConfigError("joint moment needs at least 2 replicas");
    std::vector<double> means;
    for (const auto& c : columns) means.push_back(column_mean(c));
    std::vector<double> z(R);
    for (std::size_t r = 0; r < R; ++r) {
        double v = 1.0;
        for (std::size_t i = 0; i < columns.size(); ++i) v *= columns[i][r] - means[i];
        z[r] = v;
    }
    return batch_mean_estimate(z, 1.0 / static_cast<double>(R - 1));
}

Estimate estimate_covariance(const std::vector<double>& x, const std::vector<double>& y) {
    return estimate_joint_moment({x, y});
}

Estimate estimate_mean(const std::vector<double>& values) {
    if (values.empty()) throw DomainError("mean of an empty sample");
    return batch_mean_estimate(values, 1.0 / static_cast<double>(values.size()));
}

namespace {

struct TimeLayout {
    TimeGrid grid;
    std::vector<std::size_t> entry_time;  // grid index per entry
};

TimeLayout layout_for(const std::vector<double>& times) {
    std::set<double> uniq(times.begin(), times.end());
    TimeLayout out{TimeGrid(std::vector<double>(uniq.begin(), uniq.end())), {}};
    for (double t : times) out.entry_time.push_back(out.grid.index_of(t));
    return out;
}

// traces[entry][replica]; SC order-1 entries under exact centering hold b_0 instead.
std::vector<std::vector<double>> simulate_traces(const ExperimentConfig& cfg, const TimeLayout& lay) {
    const std::size_t m = cfg.orders.size(), R = cfg.replicas;
    std::vector<std::vector<double>> traces(m, std::vector<double>(R));
    const std::size_t labels = label_count(cfg.kind, cfg.n);
    parallel_replicas(R, cfg.workers, [&](std::size_t r) {
        const BrownianEnsemble ens = sample_brownian_paths(labels, lay.grid, derive_seed(cfg.seed, r));
        for (std::size_t ti = 0; ti < lay.grid.size(); ++ti) {
            bool needed = false;
            for (std::size_t i = 0; i < m; ++i) needed |= lay.entry_time[i] == ti;
            if (!needed) continue;
            const CirculantSample sample = build_circulant(ens, cfg.kind, lay.grid[ti], cfg.n);
            Spectrum spec;
            bool have_spec = false;
            for (std::size_t i = 0; i < m; ++i) {
                if (lay.entry_time[i] != ti) continue;
                if (cfg.kind == Kind::SC && cfg.orders[i] == 1 && cfg.centering == Centering::Exact) {
                    traces[i][r] = eta1_exact(sample);
                    continue;
                }
                const unsigned power = trace_degree(cfg.kind, cfg.orders[i]);
                const TraceMethod method = resolve_trace_method(cfg.n, power, cfg.method);
                if (method == TraceMethod::Spectral) {
                    if (!have_spec) {
                        spec = spectrum(sample);
                        have_spec = true;
                    }
                    traces[i][r] = power_sum(spec, power);
                } else {
                    traces[i][r] = trace_power(sample, power, method);
                }
            }
        }
    });
    return traces;
}

std::vector<double> to_fluctuation(const ExperimentConfig& cfg, unsigned p, double t, std::vector<double> traces) {
    if (cfg.kind == Kind::SC && p == 1 && cfg.centering == Centering::Exact) return traces;
    return cfg.kind == Kind::RC ? rc_fluctuation(traces, p, t, cfg.n, cfg.centering)
                                : sc_fluctuation(traces, p, t, cfg.n, cfg.centering);
}

}  // namespace

std::vector<std::vector<double>> simulate_fluctuations(const ExperimentConfig& cfg) {
    cfg.validate();
    const TimeLayout lay = layout_for(cfg.times);
    auto traces = simulate_traces(cfg, lay);
    for (std::size_t i = 0; i < traces.size(); ++i)
        traces[i] = to_fluctuation(cfg, cfg.orders[i], cfg.times[i], std::move(traces[i]));
    return traces;
}

FluctuationSeries simulate_series(const ExperimentConfig& config, unsigned p, const TimeGrid& grid) {
    ExperimentConfig cfg = config;
    cfg.orders.assign(grid.size(), p);
    cfg.times = grid.times();
    const auto cols = simulate_fluctuations(cfg);
    FluctuationSeries series{cfg.kind, p, grid, cfg.replicas, std::vector<double>(cfg.replicas * grid.size()),
                             cfg.centering};
    for (std::size_t r = 0; r < cfg.replicas; ++r)
        for (std::size_t k = 0; k < grid.size(); ++k) series.values[r * grid.size() + k] = cols[k][r];
    return series;
}

namespace {

double try_limit(const CovQuery& q, TheoryMode mode) {
    try {
        return limit_cov(q, mode);
    } catch (const DomainError&) {
        return kNaN;
    }
}

double try_oracle(Kind kind, unsigned p, unsigned q, double t1, double t2, std::size_t n) {
    const unsigned cap = kind == Kind::RC ? kOracleMaxRcP : kOracleMaxScP;
    if (n > kOracleMaxN || p > cap || q > cap) return kNaN;
    return exact_finite_n_cov(kind, p, q, t1, t2, n);
}

// Pair (order, time) arranged so the earlier time comes first.
CovQuery ordered_query(Kind kind, unsigned pa, double ta, unsigned pb, double tb) {
    if (ta <= tb) return {kind, pa, pb, ta, tb};
    return {kind, pb, pa, tb, ta};
}

}  // namespace

CovarianceReport run_covariance_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.orders.size() != 2) throw ConfigError("covariance experiment needs exactly two orders");
    if (cfg.times[0] > cfg.times[1]) throw ConfigError("covariance experiment requires t1 <= t2");
    const auto cols = simulate_fluctuations(cfg);
    const Estimate est = estimate_covariance(cols[0], cols[1]);

    CovarianceReport rep;
    rep.experiment_id = cfg.id;
    rep.kind = cfg.kind;
    rep.p = cfg.orders[0];
    rep.q = cfg.orders[1];
    rep.t1 = cfg.times[0];
    rep.t2 = cfg.times[1];
    rep.n = cfg.n;
    rep.replicas = cfg.replicas;
    rep.seed = cfg.seed;
    rep.empirical = est.value;
    rep.se = est.se;
    const CovQuery q{cfg.kind, rep.p, rep.q, rep.t1, rep.t2};
    rep.theory_paper = try_limit(q, TheoryMode::PaperLiteral);
    rep.theory_reconciled = try_limit(q, TheoryMode::Reconciled);
    rep.oracle = try_oracle(cfg.kind, rep.p, rep.q, rep.t1, rep.t2, cfg.n);
    rep.verdict_reconciled = judge(rep.empirical, rep.theory_reconciled, rep.se, cfg.tolerance);
    rep.verdict_oracle = judge(rep.empirical, rep.oracle, rep.se, cfg.tolerance);
    rep.verdict = cfg.theory_mode == TheoryMode::Reconciled ? rep.verdict_reconciled : Verdict::NotApplicable;
    rep.config_hash = cfg.hash();
    return rep;
}

JointMomentReport run_joint_moment_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto cols = simulate_fluctuations(cfg);
    const Estimate est = estimate_joint_moment(cols);

    const std::size_t m = cols.size();
    std::vector<JointEntry> entries;
    std::map<std::pair<unsigned, double>, std::size_t> column_of;
    for (std::size_t i = 0; i < m; ++i) {
        entries.push_back({cfg.kind, cfg.orders[i], cfg.times[i]});
        column_of.emplace(std::make_pair(cfg.orders[i], cfg.times[i]), i);
    }
    auto empirical_pair = [&](const JointEntry& a, const JointEntry& b) {
        return estimate_covariance(cols[column_of.at({a.p, a.t})], cols[column_of.at({b.p, b.t})]).value;
    };
    auto theory_pair = [&](const JointEntry& a, const JointEntry& b) {
        return limit_cov(ordered_query(cfg.kind, a.p, a.t, b.p, b.t), TheoryMode::Reconciled);
    };

    JointMomentReport rep;
    rep.experiment_id = cfg.id;
    rep.empirical = est.value;
    rep.se = est.se;
    rep.reference_empirical_pairs = gaussian_joint_moment(entries, empirical_pair);
    rep.reference_theory = gaussian_joint_moment(entries, theory_pair);
    rep.verdict_self = judge(rep.empirical, rep.reference_empirical_pairs, rep.se, cfg.tolerance);
    rep.verdict_theory = judge(rep.empirical, rep.reference_theory, rep.se, cfg.tolerance);
    rep.config_hash = cfg.hash();
    return rep;
}

TightnessReport run_tightness_diagnostic(const ExperimentConfig& base, unsigned p,
                                         const std::vector<std::pair<double, double>>& pairs) {
    std::set<double> gaps;
    std::set<double> times;
    for (auto [s, t] : pairs) {
        if (!(s >= 0.0) || !(t >= s) || !std::isfinite(t)) throw ConfigError("tightness pairs need 0 <= s <= t");
        if (t > s) gaps.insert(t - s);
        times.insert(s);
        times.insert(t);
    }
    if (gaps.size() < 4) throw ConfigError("tightness diagnostic needs at least 4 distinct positive gaps");
    if (*gaps.rbegin() / *gaps.begin() < 4.0) throw ConfigError("tightness gaps must span at least a factor of 4");

    const TimeGrid grid(std::vector<double>(times.begin(), times.end()));
    const FluctuationSeries series = simulate_series(base, p, grid);

    TightnessReport rep{base.kind, p, {}, kNaN, kNaN, kNaN, kNaN};
    std::vector<double> xs, ys, ws;
    for (auto [s, t] : pairs) {
        const std::size_t is = grid.index_of(s), it = grid.index_of(t);
        std::vector<double> d4(series.replicas);
        for (std::size_t r = 0; r < series.replicas; ++r) {
            const double d = series.at(r, it) - series.at(r, is);
            d4[r] = d * d * d * d;
        }
        const Estimate e = estimate_mean(d4);
        rep.points.push_back({s, t, e.value, e.se});
        if (t > s && e.value > 0.0 && e.se > 0.0) {
            xs.push_back(std::log(t - s));
            ys.push_back(std::log(e.value));
            ws.push_back((e.value / e.se) * (e.value / e.se));
        }
    }
    if (xs.size() >= 2) {
        double sw = 0, sx = 0, sy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sw += ws[i];
            sx += ws[i] * xs[i];
            sy += ws[i] * ys[i];
        }
        const double mx = sx / sw, my = sy / sw;
        double sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxx += ws[i] * (xs[i] - mx) * (xs[i] - mx);
            sxy += ws[i] * (xs[i] - mx) * (ys[i] - my);
        }
        rep.slope = sxy / sxx;
        rep.slope_se = std::sqrt(1.0 / sxx);
        rep.band_low = rep.slope - base.tolerance * rep.slope_se;
        rep.band_high = rep.slope + base.tolerance * rep.slope_se;
    }
    return rep;
}

OddStatisticReport run_odd_statistic_experiment(const ExperimentConfig& base, unsigned p, double t) {
    if (base.replicas < 10000) throw ConfigError("odd-statistic experiment needs at least 10^4 replicas");
    if (base.n < 2) throw ConfigError("n must be at least 2");
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("odd-statistic time must be positive");
    const std::size_t R = base.replicas, n = base.n;
    const TimeGrid grid({t});
    std::vector<double> s1(R), s2(R), s3(R);
    parallel_replicas(R, base.workers, [&](std::size_t r) {
        const BrownianEnsemble ens = sample_brownian_paths(n, grid, derive_seed(base.seed, r));
        const double v = rc_odd_statistic(spectrum(build_circulant(ens, Kind::RC, t, n)), p, t);
        s1[r] = v;
        s2[r] = v * v;
        s3[r] = v * v * v;
    });
    OddStatisticReport rep;
    rep.p = p;
    rep.n = n;
    rep.t = t;
    rep.mean = estimate_mean(s1);
    rep.second = estimate_mean(s2);
    rep.third = estimate_mean(s3);
    double dfact = 1.0;
    for (unsigned k = 4 * p + 1; k > 1; k -= 2) dfact *= k;
    rep.reference_second = dfact * std::pow(t, 2.0 * p + 1.0) * (n % 2 == 0 ? 2.0 : 1.0);
    rep.verdict_mean = judge(rep.mean.value, 0.0, rep.mean.se, base.tolerance);
    rep.verdict_second = judge(rep.second.value, rep.reference_second, rep.second.se, base.tolerance);
    rep.verdict_third = judge(rep.third.value, 0.0, rep.third.se, base.tolerance);
    return rep;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into place at " + path.string());
    }
}

void export_paths(const ExperimentConfig& config, unsigned p, const TimeGrid& grid,
                  const std::filesystem::path& out) {
    const FluctuationSeries series = simulate_series(config, p, grid);
    std::string csv = "replica,t,value\n";
    for (std::size_t r = 0; r < series.replicas; ++r) {
        for (std::size_t k = 0; k < grid.size(); ++k) {
            csv += std::to_string(r);
            csv += ',';
            csv += format_double(grid[k]);
            csv += ',';
            csv += format_double(series.at(r, k));
            csv += '\n';
        }
    }
    write_file_atomic(out, csv);
}

}  // namespace circlab
