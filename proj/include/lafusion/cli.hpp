#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lafusion {

// Exit status: 0 success, 1 usage error, 2 data error.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2 };

// Runs the command line `args` (args[0] is the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lafusion
