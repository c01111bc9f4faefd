#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dfrelay::selftest {

struct Options {
  std::uint64_t seed = 20240521;
  // Negative control: the checks see a forward transform with the kernel sign flipped.
  bool corrupt_dft_sign = false;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Reduced-scale oracle and invariant checks over every module.
std::vector<CheckResult> run(const Options& opts = {});

} // namespace dfrelay::selftest
