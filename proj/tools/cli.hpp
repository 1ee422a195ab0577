#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nqh::cli {

/// Process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kCheckFailed = 1,
  kUsage = 2,
  kNumerical = 3,
};

/// Runs one command line (args excludes the program name). Subcommands:
/// verify, simulate, reconstruct, elliptic-table.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nqh::cli
