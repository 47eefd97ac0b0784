#pragma once

// Verification suites run by `qtrace verify`. Each suite counts checks and
// failures and records the largest deviation it saw.

#include <string>
#include <vector>

namespace qtrace::tools {

struct SuiteResult {
  std::string name;
  long checks = 0;
  long failures = 0;
  /// Largest |computed - reference|, or largest bound ratio for the weil suite.
  double max_error = 0.0;

  bool passed() const { return checks > 0 && failures == 0; }
};

const std::vector<std::string>& suite_names();

/// DomainError for an unknown name; "all" expands to every suite in order.
std::vector<SuiteResult> run_suites(const std::string& name, unsigned workers);

}  // namespace qtrace::tools
