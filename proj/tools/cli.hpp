#pragma once

#include <iosfwd>

namespace ltf::tools {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,
  kExitNotConverged = 3,
  kExitCertification = 4,
};

/// Entry point of the `ltf` tool. Writes reports to `out`, diagnostics to
/// `err` and returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ltf::tools
