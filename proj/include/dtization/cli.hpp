#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dtz::cli {

/// Exit codes: 0 success, 1 runtime/data failure, 2 usage error.
enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

/// Runs the `dtization` command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dtz::cli
