#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ponwm {

// Exit codes: 0 success, 1 analysis-level failure, 2 usage or config error.
enum ExitCode : int { kExitOk = 0, kExitAnalysisFailure = 1, kExitUsage = 2 };

// Entry point behind the `ponwm` binary. `args` includes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ponwm
