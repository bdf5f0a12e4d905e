#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "circlab/experiments.hpp"

namespace circlab {

struct AcceptanceOptions {
    std::uint64_t seed = 20240611;
    unsigned workers = 1;
    std::size_t replicas = 20000;
    std::set<int> only;  // empty runs every criterion
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
};

struct AcceptanceOutcome {
    std::vector<CriterionResult> criteria;
    std::vector<CovarianceReport> reports;  // covariance rows, including the paper-literal ledger rows

    bool all_passed() const;
};

inline constexpr int kCriterionCount = 13;

AcceptanceOutcome run_acceptance(const AcceptanceOptions& options,
                                 const std::function<void(const CriterionResult&)>& on_result = {});

std::string format_criterion(const CriterionResult& r);

}  // namespace circlab
