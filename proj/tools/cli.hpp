#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cproc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

std::string version();

// Parses argv (argv[0] is the program name) and runs one subcommand.
// Returns the process exit code; never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace cproc::cli
