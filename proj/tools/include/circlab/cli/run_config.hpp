#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "circlab/experiments.hpp"

namespace circlab::cli {

enum class ExperimentType { Covariance, Joint, Tightness, Odd, Paths };
std::string_view to_string(ExperimentType t);
ExperimentType parse_experiment_type(std::string_view name);

enum class OutputFormat { Csv, Json, Both };
std::string_view to_string(OutputFormat f);
OutputFormat parse_output_format(std::string_view name);

struct RunConfig {
    ExperimentConfig experiment;
    ExperimentType type = ExperimentType::Covariance;
    std::vector<double> gaps;  // tightness only
    double base_time = 0.5;    // tightness only
    std::filesystem::path output_dir;
    OutputFormat format = OutputFormat::Both;
};

// One `key = value` assignment; line 0 marks a command-line override.
struct Setting {
    std::string value;
    std::size_t line = 0;
};

using Settings = std::map<std::string, Setting, std::less<>>;

const std::vector<std::string>& known_keys();

// `#` starts a comment; blank lines are skipped; duplicate keys are rejected.
Settings parse_settings(std::string_view text);
Settings load_settings(const std::filesystem::path& path);

// Unknown keys, missing required keys and out-of-range values raise ConfigError
// naming the line (or flag) and key.
RunConfig build_run_config(const Settings& settings, const std::filesystem::path& default_output_dir);

// CIRCLAB_OUT if set, else the current directory.
std::filesystem::path default_output_dir();

std::vector<double> parse_double_list(std::string_view text);
std::vector<unsigned> parse_unsigned_list(std::string_view text);

}  // namespace circlab::cli
