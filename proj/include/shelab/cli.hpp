#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shelab {

enum ExitCode : int { exit_ok = 0, exit_validation = 2, exit_numeric = 3 };

// Runs the command line `shelab <subcommand> ...`; args excludes the program
// name. Results go to out (or the files named by --out), diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shelab
