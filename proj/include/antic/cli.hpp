#pragma once
// Command-line driver. `run` takes the arguments after the program name and
// writes results to `out`, diagnostics to `err`.
//
// Exit codes: 0 success, 1 diagnostics (bad input or usage), 2 search budget
// exhausted, 3 internal contract violation.

#include <iosfwd>
#include <string>
#include <vector>

namespace antic::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDiagnostics = 1;
inline constexpr int kExitBudget = 2;
inline constexpr int kExitContract = 3;

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace antic::cli
