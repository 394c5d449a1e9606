#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qrdm::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckResult> checks;
  std::size_t passed() const;
  std::size_t failed() const;
};

// Fast invariant suites, one per module. Deterministic for a fixed seed.
std::vector<SuiteResult> run_all(std::uint64_t seed = 1);
SuiteResult hilbert_suite(std::uint64_t seed);
SuiteResult schrodinger_suite(std::uint64_t seed);
SuiteResult rdm_suite(std::uint64_t seed);
SuiteResult beable_suite(std::uint64_t seed);
SuiteResult collapse_suite(std::uint64_t seed);
SuiteResult protective_suite(std::uint64_t seed);
SuiteResult frames_suite(std::uint64_t seed);

}  // namespace qrdm::verify
