#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace brailleband::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Runs one invocation; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Fixed 4-decimal rendering with trailing zeros removed ("0.6250" -> "0.625").
std::string trim_decimal(double value);

}  // namespace brailleband::cli
