#include "circlab/cli/report_io.hpp"

#include <cmath>
#include <sstream>

#include "circlab/errors.hpp"

namespace circlab::cli {

using nlohmann::ordered_json;

namespace {

ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string csv_cell(const ordered_json& v) {
    if (v.is_null()) return "nan";
    if (v.is_number_float()) return format_double(v.get<double>(), 17);
    if (v.is_number()) return v.dump();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    return quoted + "\"";
}

}  // namespace

const std::vector<std::string>& covariance_columns() {
    static const std::vector<std::string> cols{"experiment_id", "kind",     "p",          "q",      "t1",
                                               "t2",            "n",        "R",          "seed",   "empirical",
                                               "se",            "theory_paper", "theory_reconciled", "oracle",
                                               "verdict",       "config_hash"};
    return cols;
}

ordered_json covariance_json(const CovarianceReport& r) {
    ordered_json j;
    j["experiment_id"] = r.experiment_id;
    j["kind"] = std::string(to_string(r.kind));
    j["p"] = r.p;
    j["q"] = r.q;
    j["t1"] = r.t1;
    j["t2"] = r.t2;
    j["n"] = r.n;
    j["R"] = r.replicas;
    j["seed"] = r.seed;
    j["empirical"] = number(r.empirical);
    j["se"] = number(r.se);
    j["theory_paper"] = number(r.theory_paper);
    j["theory_reconciled"] = number(r.theory_reconciled);
    j["oracle"] = number(r.oracle);
    j["verdict"] = std::string(to_string(r.verdict));
    j["config_hash"] = r.config_hash;
    return j;
}

std::string covariance_csv(const std::vector<CovarianceReport>& reports) {
    ordered_json rows = ordered_json::array();
    for (const auto& r : reports) rows.push_back(covariance_json(r));
    if (rows.empty()) {
        std::string header;
        for (const auto& c : covariance_columns()) header += (header.empty() ? "" : ",") + c;
        return header + "\n";
    }
    return json_to_csv(rows);
}

ordered_json joint_json(const JointMomentReport& r) {
    ordered_json j;
    j["experiment_id"] = r.experiment_id;
    j["empirical"] = number(r.empirical);
    j["se"] = number(r.se);
    j["reference_empirical_pairs"] = number(r.reference_empirical_pairs);
    j["reference_theory"] = number(r.reference_theory);
    j["verdict_self"] = std::string(to_string(r.verdict_self));
    j["verdict_theory"] = std::string(to_string(r.verdict_theory));
    j["config_hash"] = r.config_hash;
    return j;
}

ordered_json tightness_json(const TightnessReport& r) {
    ordered_json j;
    j["kind"] = std::string(to_string(r.kind));
    j["p"] = r.p;
    j["slope"] = number(r.slope);
    j["slope_se"] = number(r.slope_se);
    j["band_low"] = number(r.band_low);
    j["band_high"] = number(r.band_high);
    ordered_json pts = ordered_json::array();
    for (const auto& pt : r.points)
        pts.push_back({{"s", pt.s}, {"t", pt.t}, {"moment4", number(pt.moment4)}, {"se", number(pt.se)}});
    j["points"] = std::move(pts);
    return j;
}

ordered_json odd_json(const OddStatisticReport& r) {
    ordered_json j;
    j["p"] = r.p;
    j["n"] = r.n;
    j["t"] = r.t;
    j["mean"] = number(r.mean.value);
    j["mean_se"] = number(r.mean.se);
    j["second"] = number(r.second.value);
    j["second_se"] = number(r.second.se);
    j["third"] = number(r.third.value);
    j["third_se"] = number(r.third.se);
    j["reference_second"] = number(r.reference_second);
    j["verdict_mean"] = std::string(to_string(r.verdict_mean));
    j["verdict_second"] = std::string(to_string(r.verdict_second));
    j["verdict_third"] = std::string(to_string(r.verdict_third));
    return j;
}

ordered_json criterion_json(const CriterionResult& r) {
    return {{"id", r.id}, {"title", r.title}, {"verdict", r.passed ? "pass" : "fail"}, {"detail", r.detail}};
}

std::string json_to_csv(const ordered_json& rows) {
    const ordered_json list = rows.is_array() ? rows : ordered_json::array({rows});
    if (list.empty()) return "";
    std::ostringstream os;
    bool first = true;
    for (const auto& [key, value] : list.front().items()) {
        if (value.is_structured()) continue;
        os << (first ? "" : ",") << key;
        first = false;
    }
    os << '\n';
    for (const auto& row : list) {
        first = true;
        for (const auto& [key, value] : list.front().items()) {
            if (value.is_structured()) continue;
            os << (first ? "" : ",") << csv_cell(row.at(key));
            first = false;
        }
        os << '\n';
    }
    return os.str();
}

std::vector<std::filesystem::path> write_report(const std::filesystem::path& dir, const std::string& stem,
                                                OutputFormat format, const std::string& csv,
                                                const ordered_json& json) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;
    if (format != OutputFormat::Json) {
        written.push_back(dir / (stem + ".csv"));
        write_file_atomic(written.back(), csv);
    }
    if (format != OutputFormat::Csv) {
        written.push_back(dir / (stem + ".json"));
        write_file_atomic(written.back(), json.dump(2) + "\n");
    }
    return written;
}

}  // namespace circlab::cli
