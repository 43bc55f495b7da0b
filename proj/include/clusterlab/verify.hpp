#pragma once

// The exact identity suite behind `clusterlab verify`.

#include <functional>
#include <string>

namespace clusterlab {

struct IdentityResult {
  std::string name;
  bool ok = true;
  std::string detail;
};

struct VerifyOptions {
  std::string grid = "small";  // small | medium
  unsigned workers = 1;
  std::uint64_t seed = 1;
};

/// Runs every identity on the grid, reporting each result, and stops at the
/// first failure. Returns the number of identities that held.
/// Throws std::invalid_argument for an unknown grid.
std::size_t run_identity_suite(const VerifyOptions& options, const std::function<void(const IdentityResult&)>& report);

}  // namespace clusterlab
