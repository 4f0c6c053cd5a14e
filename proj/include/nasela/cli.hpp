#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nasela::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Runs the command line `args` (args[0] is the program name). Regular output
/// goes to `out`; diagnostics go to `err` as one JSON object per line.
/// Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace nasela::cli
