#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace blackout::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRefusal = 3;
inline constexpr int kExitUsage = 64;

/// Runs one command line (args[0] is the program name). JSON results go to
/// `out`, errors and usage to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace blackout::app
