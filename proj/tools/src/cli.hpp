#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tscore::cli
{

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsageError = 2;

// Runs one command line (without the program name). Tables go to --out when
// given, else to `out`; diagnostics go to `err` as a single line.
auto run(std::vector<std::string> args, std::ostream& out, std::ostream& err) -> int;

}  // namespace tscore::cli
