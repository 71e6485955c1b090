#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fracspec::cli {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitConvergence = 2,
  kExitRegularity = 3,
};

/// Runs one subcommand (args excludes the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace fracspec::cli
