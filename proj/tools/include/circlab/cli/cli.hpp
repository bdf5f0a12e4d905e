#pragma once

#include <iosfwd>

namespace circlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerdictFailure = 1;
inline constexpr int kExitConfigError = 2;

// Subcommands: simulate, theory, oracle, enumerate, verify.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace circlab::cli
