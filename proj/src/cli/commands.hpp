#pragma once

#include <iosfwd>

namespace anticonc::cli {

enum ExitCode : int {
  kOk = 0,
  kAssertionFailure = 1,
  kUsage = 2,
  kNotPsd = 3,
  kDegenerate = 4,
};

/// Entry point of the `anticonc` tool: subcommands bound, mgf, prob,
/// verify and fuzz. Writes results to `out`, diagnostics to `err` and
/// returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace anticonc::cli
