#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mirrorsim::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kInputError = 1,       // parse errors, bad flags or values, unknown names
  kSimulationError = 2,  // non-convergence, singular system, unsettled run, calibration failure
  kIoError = 3,          // unreadable input, unwritable output
};

struct CliEnvironment {
  bool color = false;  // ANSI colors in diagnostics (still disabled by MIRRORSIM_NO_COLOR)
};

/// Runs `mirrorsim` with `args` (without the program name). CSV output goes to
/// `out` unless redirected with -o; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const CliEnvironment& env = {});

}  // namespace mirrorsim::cli
