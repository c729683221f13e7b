#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vulnrank::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Runs one command line (args[0] is the program name). Progress goes to
// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vulnrank::cli
