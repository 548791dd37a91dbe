#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace likecat::cli {

enum ExitStatus : int { kSuccess = 0, kUsageError = 1, kDataError = 2, kRuntimeError = 3 };

/// Runs one command line (args[0] is the program name). Results go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace likecat::cli
