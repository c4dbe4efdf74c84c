#pragma once

#include <iosfwd>

namespace astrack::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  ///< computation aborted
inline constexpr int kExitUsage = 2;    ///< bad flags or malformed scenario
inline constexpr int kExitCheck = 3;    ///< --check threshold breached

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace astrack::cli
