#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rcjhand {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "RCJHAND_OUT_DIR";

/// Runs one CLI invocation; argv[0] is the program name.
int run_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace rcjhand
