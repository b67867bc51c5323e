#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace numreason {

inline constexpr int kFormatVersion = 1;

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;   // usage, configuration or schema problems
inline constexpr int kExitDomain = 2;  // unexecutable program

// Entry point behind the `numreason` binary. `args` excludes the program
// name. Output files named "-" (the default) go to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace numreason
