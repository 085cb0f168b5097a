#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stochgrad::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kRuntimeError = 1, kUsageError = 2 };

/// Entry point of the `stochgrad` tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stochgrad::cli
