#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dckit::cli {

/// Exit codes beyond the verdict codes 0/1/2.
inline constexpr int kExitUsage = 3;
inline constexpr int kExitNumeric = 4;

/// Run the tool on `args` (without the program name). Writes one report to `out` (or the file
/// named by --output) and diagnostics to `err`; returns the exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Names accepted by the cookbook subcommand.
const std::vector<std::string>& cookbook_sections();

} // namespace dckit::cli
