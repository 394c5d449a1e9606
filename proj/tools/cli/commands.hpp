#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scenario.hpp"

namespace qrdm::cli {

inline constexpr const char* kToolVersion = QRDM_TOOL_VERSION;

struct RunOptions {
  std::string out_dir = ".";
  unsigned threads = 1;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
};

struct RunResult {
  std::string summary;
  std::vector<std::string> outputs;  // paths relative to out_dir, manifest last
  bool ok = true;                    // false only for verify with failing checks
};

const std::vector<std::string>& subcommands();

// Scenario-free defaults exist for verify and tau-c only.
std::optional<Scenario> default_scenario(const std::string& subcommand);

RunResult run_scenario(const std::string& subcommand, const Scenario& scenario, const RunOptions& options);

// Full front end: flag parsing, error mapping, exit status 0 / 1 / 2.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qrdm::cli
