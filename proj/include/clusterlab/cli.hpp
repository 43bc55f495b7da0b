#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace clusterlab {

/// Exit codes of the command line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitIdentityFailure = 1,
  kExitUsage = 2,  // validation errors and guard violations
};

/// Runs one command line (without the program name). Normal output goes to
/// `out` unless --out names a file; warnings and errors go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace clusterlab
