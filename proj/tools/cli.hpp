#pragma once

#include <string>
#include <vector>

namespace sensikit::cli {

inline constexpr const char* kToolName = "sensikit";
inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kDegenerate = 3,
  kInterrupted = 130,
};

/// Runs one command line (argv[0] is the program name). Diagnostics go to
/// stderr; the return value is the process exit code.
int run(const std::vector<std::string>& args);

}  // namespace sensikit::cli
