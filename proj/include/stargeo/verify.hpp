#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace stargeo {

struct CheckResult {
  std::string suite;
  std::string name;
  bool pass = false;
  /// Worst observed deviation (or the checked quantity).
  double value = 0.0;
  double tolerance = 0.0;
};

/// Invariant suites over every module. quick uses fewer random trials.
std::vector<CheckResult> run_verify_suite(bool quick, std::uint64_t seed = 7);

}  // namespace stargeo
