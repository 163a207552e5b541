#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ddah {

/// Exit status of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

/// Runs the `ddah` command line. args excludes the program name. Normal output
/// goes to out, diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ddah
