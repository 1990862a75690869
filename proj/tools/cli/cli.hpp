#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bet::cli {

enum ExitCode : int {
  kPassed = 0,
  kCheckFailed = 1,
  kUsage = 2,
  kSchema = 3,
  kHypothesisNotMet = 4,
};

/// Runs one command line (without the program name). The JSON report goes to `out` in a
/// single write; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bet::cli
