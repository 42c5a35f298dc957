#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lls {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidationFailed = 1,
  kExitUsage = 2,
  kExitNumerical = 3,
};

/// Runs the lls-sense command line. `args` includes the program name.
/// Reports go to `out` (or --out FILE), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lls
