#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace medsmooth {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitInputError = 1, kExitCertificationImpossible = 2 };

/// Runs one subcommand. `args` excludes the program name. Worker count is
/// read from MEDSMOOTH_WORKERS.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace medsmooth
