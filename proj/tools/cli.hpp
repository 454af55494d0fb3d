#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mixlab::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNegative = 2;  // infeasible instance or negative diagnostic

/// Runs the command line `args` (without the program name) in-process.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mixlab::cli
