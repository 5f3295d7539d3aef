#pragma once

namespace tourney::cli {

// Exit codes: 0 success, 1 usage or validation error, 2 numeric
// non-convergence, 3 Monte Carlo z-score failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumeric = 2;
inline constexpr int kExitOracle = 3;

int run(int argc, const char* const* argv);

}  // namespace tourney::cli
