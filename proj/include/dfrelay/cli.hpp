#pragma once

#include <ostream>

namespace dfrelay::cli {

enum ExitCode : int {
  kSuccess = 0,
  kVerificationFailure = 1,
  kConfigError = 2,
  kIoError = 3,
};

// Entry point of the `dfrelay` tool; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace dfrelay::cli
