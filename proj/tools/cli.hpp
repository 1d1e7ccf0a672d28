#pragma once

#include <iosfwd>

namespace mchain::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kInvalidArguments = 2,
  kSearchFailed = 3,
  kIngestionFailed = 4,
  kSimulationFailed = 5,
};

/// Runs the command line; stdout/stderr are injectable for tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mchain::cli
