#include "circlab/cli/cli.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "circlab/acceptance.hpp"
#include "circlab/cli/report_io.hpp"
#include "circlab/cli/run_config.hpp"
#include "circlab/combinatorics.hpp"
#include "circlab/errors.hpp"
#include "circlab/experiments.hpp"
#include "circlab/limit_theory.hpp"

namespace circlab::cli {

namespace {

using nlohmann::ordered_json;

std::string h(double v) { return format_double(v, 6); }
std::string m(double v) { return format_double(v, 17); }

struct SimulateArgs {
    std::string config;
    std::map<std::string, std::string> overrides;
};

struct TheoryArgs {
    std::string kind = "rc";
    unsigned p = 1;
    unsigned q = 1;
    double t1 = 1.0;
    std::optional<double> t2;
    std::string mode = "reconciled";
    bool with_oracle = false;
    std::vector<std::size_t> oracle_n{5, 7, 9, 11};
};

struct OracleArgs {
    std::string kind = "rc";
    unsigned p = 1;
    unsigned q = 1;
    double t1 = 1.0;
    std::optional<double> t2;
    std::vector<std::size_t> n;
};

struct EnumerateArgs {
    std::string family;
    int n = 0;
    int p = 1;
    int s = 0;
    int k = 0;
    bool list = false;
    double max_cost = 1e8;
};

struct VerifyArgs {
    std::uint64_t seed = 20240611;
    unsigned workers = 1;
    std::size_t replicas = 20000;
    std::vector<int> only;
    std::string out;
    std::string format = "both";
};

CovQuery make_query(const std::string& kind, unsigned p, unsigned q, double t1, std::optional<double> t2) {
    CovQuery query{parse_kind(kind), p, q, t1, t2.value_or(t1)};
    if (query.t1 > query.t2) {
        std::swap(query.t1, query.t2);
        std::swap(query.p, query.q);
    }
    return query;
}

std::vector<std::size_t> oracle_sizes(Kind kind, unsigned p, unsigned q, std::vector<std::size_t> sizes) {
    const unsigned cap = kind == Kind::RC ? kOracleMaxRcP : kOracleMaxScP;
    if (std::max(p, q) > cap)
        throw CapacityError("p,q<=" + std::to_string(cap), "oracle unavailable for p=" + std::to_string(p) +
                                                               ", q=" + std::to_string(q));
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    return sizes;
}

void print_oracle_rows(std::ostream& out, const CovQuery& query, const std::vector<std::size_t>& sizes) {
    std::vector<std::pair<double, double>> seq;
    for (std::size_t n : sizes) {
        const double v = exact_finite_n_cov(query.kind, query.p, query.q, query.t1, query.t2, n);
        seq.emplace_back(static_cast<double>(n), v);
        out << "oracle," << n << ',' << m(v) << '\n';
    }
    if (seq.size() >= 3) {
        const auto ex = extrapolate_limit(seq);
        out << "extrapolated,," << m(ex.limit) << '\n';
    }
}

int do_simulate(const SimulateArgs& args, std::ostream& out) {
    Settings settings = args.config.empty() ? Settings{} : load_settings(args.config);
    for (const auto& [key, value] : args.overrides) settings[key] = Setting{value, 0};
    const RunConfig rc = build_run_config(settings, default_output_dir());
    const auto& e = rc.experiment;

    std::vector<std::filesystem::path> written;
    switch (rc.type) {
        case ExperimentType::Covariance: {
            const auto r = run_covariance_experiment(e);
            written = write_report(rc.output_dir, e.id, rc.format, covariance_csv({r}), covariance_json(r));
            out << e.id << ": " << to_string(r.kind) << " p=" << r.p << " q=" << r.q << " t1=" << h(r.t1)
                << " t2=" << h(r.t2) << " n=" << r.n << " R=" << r.replicas << "\n  empirical " << h(r.empirical)
                << " (se " << h(r.se) << ")\n  paper-literal " << h(r.theory_paper) << ", reconciled "
                << h(r.theory_reconciled) << ", oracle " << h(r.oracle) << "\n  verdict " << to_string(r.verdict)
                << '\n';
            break;
        }
        case ExperimentType::Joint: {
            const auto r = run_joint_moment_experiment(e);
            const auto j = joint_json(r);
            written = write_report(rc.output_dir, e.id, rc.format, json_to_csv(j), j);
            out << e.id << ": joint moment " << h(r.empirical) << " (se " << h(r.se) << "), wick[empirical pairs] "
                << h(r.reference_empirical_pairs) << " " << to_string(r.verdict_self) << ", wick[theory] "
                << h(r.reference_theory) << " " << to_string(r.verdict_theory) << '\n';
            break;
        }
        case ExperimentType::Tightness: {
            std::vector<std::pair<double, double>> pairs;
            for (double g : rc.gaps) pairs.emplace_back(rc.base_time, rc.base_time + g);
            const auto r = run_tightness_diagnostic(e, e.orders[0], pairs);
            const auto j = tightness_json(r);
            written = write_report(rc.output_dir, e.id, rc.format, json_to_csv(j["points"]), j);
            out << e.id << ": slope " << h(r.slope) << " (se " << h(r.slope_se) << ", band [" << h(r.band_low)
                << ", " << h(r.band_high) << "])\n";
            break;
        }
        case ExperimentType::Odd: {
            const auto r = run_odd_statistic_experiment(e, e.orders[0], e.times[0]);
            const auto j = odd_json(r);
            written = write_report(rc.output_dir, e.id, rc.format, json_to_csv(j), j);
            out << e.id << ": mean " << h(r.mean.value) << " (se " << h(r.mean.se) << "), second "
                << h(r.second.value) << " (se " << h(r.second.se) << ", ref " << h(r.reference_second) << ") "
                << to_string(r.verdict_second) << '\n';
            break;
        }
        case ExperimentType::Paths: {
            std::error_code ec;
            std::filesystem::create_directories(rc.output_dir, ec);
            if (ec) throw IoError("cannot create output directory " + rc.output_dir.string() + ": " + ec.message());
            written.push_back(rc.output_dir / (e.id + ".csv"));
            export_paths(e, e.orders[0], TimeGrid(e.times), written.back());
            break;
        }
    }
    for (const auto& p : written) out << "wrote " << p.string() << '\n';
    return kExitOk;
}

int do_theory(const TheoryArgs& args, std::ostream& out) {
    const CovQuery query = make_query(args.kind, args.p, args.q, args.t1, args.t2);
    const double v = limit_cov(query, parse_mode(args.mode));
    if (!args.with_oracle) {
        out << m(v) << '\n';
        return kExitOk;
    }
    const auto sizes = oracle_sizes(query.kind, query.p, query.q, args.oracle_n);
    out << "source,n,value\n" << args.mode << ",," << m(v) << '\n';
    print_oracle_rows(out, query, sizes);
    return kExitOk;
}

int do_oracle(const OracleArgs& args, std::ostream& out) {
    const CovQuery query = make_query(args.kind, args.p, args.q, args.t1, args.t2);
    const auto sizes = oracle_sizes(query.kind, query.p, query.q, args.n);
    if (sizes.size() == 1) {
        out << m(exact_finite_n_cov(query.kind, query.p, query.q, query.t1, query.t2, sizes[0])) << '\n';
        return kExitOk;
    }
    out << "source,n,value\n";
    print_oracle_rows(out, query, sizes);
    return kExitOk;
}

int do_enumerate(const EnumerateArgs& args, std::ostream& out) {
    const Family family = parse_family(args.family);
    const int length = (family == Family::A2p || family == Family::A2ps) ? 2 * args.p : args.p;
    const FamilyParams params{length, args.s, args.k};
    const EnumLimits limits{args.max_cost};
    if (!args.list) {
        out << count_tuples(family, args.n, params, limits) << '\n';
        return kExitOk;
    }
    const bool signed_family = is_signed(family);
    for (int i = 1; i <= length; ++i) out << (i > 1 ? "," : "") << 'i' << i;
    if (signed_family)
        for (int i = 1; i <= length; ++i) out << ",e" << i;
    out << '\n';
    for_each_tuple(
        family, args.n, params,
        [&](std::span<const int> idx, std::span<const int> sgn) {
            for (std::size_t i = 0; i < idx.size(); ++i) out << (i ? "," : "") << idx[i];
            for (int s : sgn) out << ',' << s;
            out << '\n';
        },
        limits);
    return kExitOk;
}

int do_verify(const VerifyArgs& args, std::ostream& out) {
    const OutputFormat format = parse_output_format(args.format);
    AcceptanceOptions opt;
    opt.seed = args.seed;
    opt.workers = args.workers;
    opt.replicas = args.replicas;
    for (int id : args.only) {
        if (id < 1 || id > kCriterionCount)
            throw ConfigError("--only: criterion " + std::to_string(id) + " is outside 1.." +
                              std::to_string(kCriterionCount));
        opt.only.insert(id);
    }
    const std::filesystem::path dir = args.out.empty() ? default_output_dir() : std::filesystem::path(args.out);
    const auto outcome = run_acceptance(opt, [&](const CriterionResult& r) { out << format_criterion(r) << '\n'; });

    ordered_json criteria = ordered_json::array();
    for (const auto& c : outcome.criteria) criteria.push_back(criterion_json(c));
    ordered_json reports = ordered_json::array();
    for (const auto& r : outcome.reports) reports.push_back(covariance_json(r));
    const ordered_json doc{{"seed", args.seed}, {"replicas", args.replicas}, {"criteria", criteria},
                           {"reports", reports}};
    auto written = write_report(dir, "verify_ledger", format, covariance_csv(outcome.reports), doc);
    if (format != OutputFormat::Json) {
        auto more = write_report(dir, "verify_criteria", OutputFormat::Csv, json_to_csv(criteria), {});
        written.insert(written.end(), more.begin(), more.end());
    }
    for (const auto& p : written) out << "wrote " << p.string() << '\n';
    const auto passed = std::count_if(outcome.criteria.begin(), outcome.criteria.end(),
                                      [](const CriterionResult& c) { return c.passed; });
    out << passed << "/" << outcome.criteria.size() << " criteria passed\n";
    return outcome.all_passed() ? kExitOk : kExitVerdictFailure;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"circlab: circulant random matrix fluctuation toolkit"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo experiment from a key=value config");
    simulate->add_option("--config,-c", sim.config, "config file (flat key = value lines)");
    std::map<std::string, std::string> flag_values;
    for (const auto& key : known_keys()) {
        std::string names = "--" + key;
        if (key == "theory_mode") names += ",--mode";
        if (key == "output_dir") names += ",--out";
        simulate->add_option(names, flag_values[key], "override config key '" + key + "'");
    }

    TheoryArgs th;
    auto* theory = app.add_subcommand("theory", "evaluate the limiting covariance");
    theory->add_option("--kind", th.kind)->required();
    theory->add_option("--p", th.p)->required();
    theory->add_option("--q", th.q)->required();
    theory->add_option("--t1", th.t1)->required();
    theory->add_option("--t2", th.t2);
    theory->add_option("--mode", th.mode, "paper-literal or reconciled");
    theory->add_flag("--with-oracle", th.with_oracle, "append the finite-n oracle sequence and extrapolation");
    theory->add_option("--oracle-n", th.oracle_n)->delimiter(',');

    OracleArgs orc;
    auto* oracle = app.add_subcommand("oracle", "exact finite-n covariance");
    oracle->add_option("--kind", orc.kind)->required();
    oracle->add_option("--p", orc.p)->required();
    oracle->add_option("--q", orc.q)->required();
    oracle->add_option("--t1", orc.t1)->required();
    oracle->add_option("--t2", orc.t2);
    oracle->add_option("--n", orc.n, "one dimension, or three or more for an extrapolated limit")
        ->required()
        ->delimiter(',');

    EnumerateArgs en;
    auto* enumerate_cmd = app.add_subcommand("enumerate", "count or list constrained index tuples");
    enumerate_cmd->add_option("--family", en.family, "a2p, a2ps, ak_sc, atilde_sc, apk")->required();
    enumerate_cmd->add_option("--n", en.n)->required();
    enumerate_cmd->add_option("--p", en.p, "half-length for a2p/a2ps, tuple length otherwise")->required();
    enumerate_cmd->add_option("--s", en.s);
    enumerate_cmd->add_option("--k", en.k);
    enumerate_cmd->add_flag("--list", en.list, "print tuples as CSV instead of the count");
    enumerate_cmd->add_option("--max-cost", en.max_cost);

    VerifyArgs vf;
    auto* verify = app.add_subcommand("verify", "run the acceptance sweep and write the ledger report");
    verify->add_option("--seed", vf.seed);
    verify->add_option("--workers", vf.workers, "0 selects the hardware concurrency");
    verify->add_option("--replicas", vf.replicas);
    verify->add_option("--only", vf.only)->delimiter(',');
    verify->add_option("--out", vf.out);
    verify->add_option("--format", vf.format);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (*simulate) {
            for (const auto& key : known_keys())
                if (simulate->count("--" + key) > 0) sim.overrides[key] = flag_values[key];
            return do_simulate(sim, out);
        }
        if (*theory) return do_theory(th, out);
        if (*oracle) return do_oracle(orc, out);
        if (*enumerate_cmd) return do_enumerate(en, out);
        if (*verify) return do_verify(vf, out);
    } catch (const CapacityError& e) {
        err << "capacity error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
    return kExitConfigError;
}

}  // namespace circlab::cli
