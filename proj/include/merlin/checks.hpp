#pragma once

#include <string>
#include <vector>

namespace merlin {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Built-in verification battery: analytic gradients vs finite differences
/// for all three objectives, pobv vs a Monte-Carlo oracle, the generator's
/// population identities, and the FFT vs direct summation. The quick subset
/// trades sample sizes for runtime (well under 30 s).
std::vector<CheckResult> run_self_checks(bool quick);

}  // namespace merlin
