#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ostrovsky::cli {

/// Process exit codes.
enum ExitCode : int {
  kPass = 0,
  kUsage = 1,
  kNumerical = 2,
  kStatisticalFail = 3,
  kInconclusive = 4,
};

/// Runs the command line `args` (args[0] is the program name). Reports go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ostrovsky::cli
