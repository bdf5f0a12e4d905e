#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "circlab/acceptance.hpp"
#include "circlab/cli/run_config.hpp"
#include "circlab/experiments.hpp"

namespace circlab::cli {

// Column order shared by the CSV header and the JSON object keys.
const std::vector<std::string>& covariance_columns();

std::string covariance_csv(const std::vector<CovarianceReport>& reports);
nlohmann::ordered_json covariance_json(const CovarianceReport& report);

nlohmann::ordered_json joint_json(const JointMomentReport& report);
nlohmann::ordered_json tightness_json(const TightnessReport& report);
nlohmann::ordered_json odd_json(const OddStatisticReport& report);
nlohmann::ordered_json criterion_json(const CriterionResult& result);

// CSV rendering of a flat JSON object or an array of flat objects.
std::string json_to_csv(const nlohmann::ordered_json& rows);

// Writes <dir>/<stem>.csv and/or <dir>/<stem>.json atomically; returns the paths written.
std::vector<std::filesystem::path> write_report(const std::filesystem::path& dir, const std::string& stem,
                                                OutputFormat format, const std::string& csv,
                                                const nlohmann::ordered_json& json);

}  // namespace circlab::cli
