#include "circlab/cli/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "circlab/errors.hpp"

namespace circlab::cli {

std::string_view to_string(ExperimentType t) {
    switch (t) {
        case ExperimentType::Covariance: return "covariance";
        case ExperimentType::Joint: return "joint";
        case ExperimentType::Tightness: return "tightness";
        case ExperimentType::Odd: return "odd";
        case ExperimentType::Paths: return "paths";
    }
    return "?";
}

ExperimentType parse_experiment_type(std::string_view name) {
    for (auto t : {ExperimentType::Covariance, ExperimentType::Joint, ExperimentType::Tightness, ExperimentType::Odd,
                   ExperimentType::Paths})
        if (name == to_string(t)) return t;
    throw ConfigError("unknown experiment '" + std::string(name) + "' (covariance, joint, tightness, odd, paths)");
}

std::string_view to_string(OutputFormat f) {
    switch (f) {
        case OutputFormat::Csv: return "csv";
        case OutputFormat::Json: return "json";
        case OutputFormat::Both: return "both";
    }
    return "?";
}

OutputFormat parse_output_format(std::string_view name) {
    for (auto f : {OutputFormat::Csv, OutputFormat::Json, OutputFormat::Both})
        if (name == to_string(f)) return f;
    throw ConfigError("unknown format '" + std::string(name) + "' (csv, json, both)");
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys{
        "experiment", "id",        "kind",   "orders",   "times",     "n",         "replicas",   "seed",
        "centering",  "theory_mode", "tolerance", "workers", "method", "gaps", "base_time", "output_dir", "format"};
    return keys;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string where(const std::string& key, const Setting& s) {
    return s.line == 0 ? "flag --" + key : "line " + std::to_string(s.line) + ", key '" + key + "'";
}

template <class T>
T parse_integer(std::string_view text) {
    T v{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("expected an integer, got '" + std::string(text) + "'");
    return v;
}

double parse_real(std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("expected a number, got '" + std::string(text) + "'");
    return v;
}

template <class F>
auto list_of(std::string_view text, F parse) {
    std::vector<decltype(parse(text))> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto item = trim(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (item.empty()) throw ConfigError("empty list element in '" + std::string(text) + "'");
        out.push_back(parse(item));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

}  // namespace

std::vector<double> parse_double_list(std::string_view text) { return list_of(trim(text), parse_real); }

std::vector<unsigned> parse_unsigned_list(std::string_view text) {
    return list_of(trim(text), parse_integer<unsigned>);
}

Settings parse_settings(std::string_view text) {
    Settings out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        if (auto it = out.find(key); it != out.end())
            throw ConfigError("line " + std::to_string(line_no) + ": key '" + key + "' already set on line " +
                              std::to_string(it->second.line));
        out.emplace(key, Setting{value, line_no});
    }
    return out;
}

Settings load_settings(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_settings(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::filesystem::path default_output_dir() {
    if (const char* env = std::getenv("CIRCLAB_OUT"); env && *env) return env;
    return std::filesystem::current_path();
}

RunConfig build_run_config(const Settings& settings, const std::filesystem::path& default_output) {
    const auto& keys = known_keys();
    for (const auto& [key, s] : settings)
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw ConfigError(where(key, s) + ": unknown key");

    RunConfig rc;
    rc.output_dir = default_output;
    auto& e = rc.experiment;

    auto with = [&](const std::string& key, auto&& apply) {
        auto it = settings.find(key);
        if (it == settings.end()) return false;
        try {
            apply(it->second.value);
        } catch (const CapacityError&) {
            throw;
        } catch (const Error& err) {
            throw ConfigError(where(key, it->second) + ": " + err.what());
        }
        return true;
    };
    auto require = [&](const std::string& key) {
        if (!settings.count(key)) throw ConfigError("missing required key '" + key + "'");
    };

    require("experiment");
    require("kind");
    require("orders");
    with("experiment", [&](const std::string& v) { rc.type = parse_experiment_type(v); });
    with("kind", [&](const std::string& v) { e.kind = parse_kind(v); });
    with("orders", [&](const std::string& v) { e.orders = parse_unsigned_list(v); });
    if (rc.type == ExperimentType::Tightness) {
        require("gaps");
    } else {
        require("times");
    }
    with("times", [&](const std::string& v) { e.times = parse_double_list(v); });
    with("id", [&](const std::string& v) {
        if (v.empty() || v.find_first_of("/\\ ") != std::string::npos)
            throw ConfigError("id must be non-empty without spaces or path separators");
        e.id = v;
    });
    with("n", [&](const std::string& v) { e.n = parse_integer<std::size_t>(v); });
    with("replicas", [&](const std::string& v) { e.replicas = parse_integer<std::size_t>(v); });
    with("seed", [&](const std::string& v) { e.seed = parse_integer<std::uint64_t>(v); });
    with("centering", [&](const std::string& v) { e.centering = parse_centering(v); });
    with("theory_mode", [&](const std::string& v) { e.theory_mode = parse_mode(v); });
    with("tolerance", [&](const std::string& v) { e.tolerance = parse_real(v); });
    with("workers", [&](const std::string& v) { e.workers = parse_integer<unsigned>(v); });
    with("method", [&](const std::string& v) { e.method = parse_trace_method(v); });
    with("gaps", [&](const std::string& v) {
        rc.gaps = parse_double_list(v);
        for (double g : rc.gaps)
            if (!(g > 0.0)) throw ConfigError("gaps must be positive");
    });
    with("base_time", [&](const std::string& v) {
        rc.base_time = parse_real(v);
        if (!(rc.base_time >= 0.0)) throw ConfigError("base_time must be non-negative");
    });
    with("output_dir", [&](const std::string& v) { rc.output_dir = v; });
    with("format", [&](const std::string& v) { rc.format = parse_output_format(v); });

    switch (rc.type) {
        case ExperimentType::Covariance:
            if (e.orders.size() != 2) throw ConfigError("covariance experiment needs exactly two orders");
            break;
        case ExperimentType::Joint:
            if (e.orders.size() < 2 || e.orders.size() > 4) throw ConfigError("joint experiment needs 2 to 4 orders");
            break;
        case ExperimentType::Tightness:
            if (e.orders.size() != 1) throw ConfigError("tightness experiment needs exactly one order");
            e.times = {rc.base_time};
            break;
        case ExperimentType::Odd:
            if (e.orders.size() != 1 || e.times.size() != 1)
                throw ConfigError("odd experiment needs one order and one time");
            if (e.kind != Kind::RC) throw ConfigError("odd experiment is defined for kind rc only");
            if (e.replicas < 10000) throw ConfigError("odd experiment needs replicas >= 10000");
            break;
        case ExperimentType::Paths:
            if (e.orders.size() != 1) throw ConfigError("paths export needs exactly one order");
            break;
    }
    if (rc.type == ExperimentType::Paths) {
        ExperimentConfig probe = e;
        probe.orders.assign(e.times.size(), e.orders[0]);
        probe.validate();
        (void)TimeGrid(e.times);  // throws on an unsorted or duplicated grid
    } else if (rc.type == ExperimentType::Odd) {
        if (!(e.times[0] > 0.0)) throw ConfigError("odd experiment time must be positive");
        ExperimentConfig probe = e;
        probe.validate();
    } else {
        e.validate();
    }
    return rc;
}

}  // namespace circlab::cli
