#pragma once

#include <iosfwd>

namespace tsvar::cli {

/// Exit codes of the tsvarlab tool.
enum ExitCode : int {
  kOk = 0,
  kSolverFailure = 2,
  kInvalidInput = 3,
  kToleranceExceeded = 4,
};

/// Entry point of `tsvarlab solve|check|sweep <file> [options]`. CSV goes to
/// --out when given (summary lines to `out`), otherwise CSV goes to `out` and
/// summary lines to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tsvar::cli
