#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "circlab/acceptance.hpp"

int main(int argc, char** argv) {
    CLI::App app{"circlab acceptance: one pass/fail line per criterion"};
    circlab::AcceptanceOptions opt;
    std::vector<int> only;
    app.add_option("--seed", opt.seed);
    app.add_option("--workers", opt.workers, "0 selects the hardware concurrency");
    app.add_option("--replicas", opt.replicas);
    app.add_option("--only", only, "comma-separated criterion ids")->delimiter(',')->check(CLI::Range(1, 13));
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    opt.only.insert(only.begin(), only.end());
    const auto outcome = circlab::run_acceptance(opt, [](const circlab::CriterionResult& r) {
        std::cout << circlab::format_criterion(r) << std::endl;
    });
    return outcome.all_passed() ? 0 : 1;
}
