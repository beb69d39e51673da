#pragma once

#include <string>
#include <vector>

namespace karcher {

struct SelftestResult {
  int passed = 0;
  int failed = 0;
  /// One "PASS <module>/<check>" or "FAIL <module>/<check>: detail" per check.
  std::vector<std::string> lines;
};

/// Quick invariant checks across every module, deterministic and a few
/// seconds at most.
SelftestResult run_selftest();

}  // namespace karcher
