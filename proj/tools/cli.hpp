#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pse::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 1;
inline constexpr int kDataError = 2;

/// Runs the `pse` command line. `args` excludes the program name. Normal
/// output goes to `out`; diagnostics go to `err` as a single line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pse::cli
