#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bntrim::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kGuardError = 3,
};

/// Runs one invocation. `args` excludes the program name. Results go to
/// `out`; diagnostics and the search trace go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bntrim::cli
