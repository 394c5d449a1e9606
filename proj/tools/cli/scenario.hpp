#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qrdm/errors.hpp"

namespace qrdm::cli {

using json = nlohmann::json;

struct ScenarioError : ContractError {
  explicit ScenarioError(const std::string& m) : ContractError("scenario", m) {}
};

// Parsed scenario file. `params` holds the subcommand parameters; everything is kept
// as JSON so the canonical form and the hash cover exactly what was read.
struct Scenario {
  std::string name;
  std::string command;  // empty when the file does not pin one
  std::uint64_t seed = 0;
  json params = json::object();

  json canonical() const;
  std::string hash() const;  // FNV-1a 64 over canonical().dump(), 16 hex digits
};

json yaml_to_json(const std::string& text);
Scenario scenario_from_json(const json& doc);
Scenario load_scenario_text(const std::string& text);
Scenario load_scenario_file(const std::string& path);

std::uint64_t fnv1a64(const std::string& bytes) noexcept;

// Typed access with errors that name the offending key.
class Params {
 public:
  Params(const json& j, std::string where) : j_(j), where_(std::move(where)) {}

  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }
  const json& raw(const std::string& key) const;
  Params child(const std::string& key) const { return {raw(key), where_ + "." + key}; }

  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }
  std::size_t count(const std::string& key) const;
  std::size_t count(const std::string& key, std::size_t fallback) const { return has(key) ? count(key) : fallback; }
  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
  }
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<std::size_t> counts(const std::string& key) const;

  const std::string& where() const noexcept { return where_; }

 private:
  const json& j_;
  std::string where_;
};

}  // namespace qrdm::cli
