#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bz::cli {

/// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitNumeric = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the bzcanard tool. argv[0] is the program name. Data goes to
/// out, usage text and error names to err; diagnostics go through the logger
/// selected by BZ_LOG.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace bz::cli
