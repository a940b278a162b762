#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace quditbell::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kBudgetError = 2;

// Environment variable holding the default enumeration budget.
inline constexpr const char* kBudgetEnv = "QUDITBELL_BUDGET";

// Runs one command line (args excludes the program name). Reports go to
// `out` (or --out), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace quditbell::cli
