#include "scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace qrdm::cli {

namespace {

json scalar_to_json(const YAML::Node& n) {
  const std::string& s = n.Scalar();
  if (n.Tag() == "!") return s;  // quoted scalars stay strings
  if (s == "true" || s == "True") return true;
  if (s == "false" || s == "False") return false;
  if (s == "null" || s == "~" || s.empty()) return nullptr;
  std::size_t used = 0;
  try {
    if (s.find_first_of(".eEnN") == std::string::npos) {
      const long long v = std::stoll(s, &used);
      if (used == s.size()) return v;
    }
  } catch (const std::exception&) {
  }
  try {
    const double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  return s;
}

json node_to_json(const YAML::Node& n) {
  switch (n.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Scalar:
      return scalar_to_json(n);
    case YAML::NodeType::Sequence: {
      json a = json::array();
      for (const auto& item : n) a.push_back(node_to_json(item));
      return a;
    }
    case YAML::NodeType::Map: {
      json o = json::object();
      for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        if (o.contains(key)) throw ScenarioError("duplicate key '" + key + "'");
        o[key] = node_to_json(kv.second);
      }
      return o;
    }
  }
  return nullptr;
}

}  // namespace

json yaml_to_json(const std::string& text) {
  try {
    return node_to_json(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw ScenarioError(std::string("malformed scenario: ") + e.what());
  }
}

json Scenario::canonical() const {
  // nlohmann objects are key-sorted, so dump() is canonical already.
  return json{{"name", name}, {"command", command}, {"seed", seed}, {"params", params}};
}

std::uint64_t fnv1a64(const std::string& bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string Scenario::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical().dump())));
  return buf;
}

Scenario scenario_from_json(const json& doc) {
  if (!doc.is_object()) throw ScenarioError("scenario must be a key-value map");
  for (const auto& [key, _] : doc.items())
    if (key != "name" && key != "command" && key != "seed" && key != "params")
      throw ScenarioError("unknown top-level key '" + key + "'");
  Scenario s;
  const Params top(doc, "scenario");
  s.name = top.text("name");
  if (s.name.empty() || s.name.find_first_of("/\\ ") != std::string::npos)
    throw ScenarioError("scenario.name must be a non-empty file-safe word");
  s.command = top.text("command", "");
  if (top.has("seed")) {
    const auto& v = doc.at("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw ScenarioError("scenario.seed must be a non-negative integer");
    s.seed = v.get<std::uint64_t>();
  }
  if (top.has("params")) {
    if (!doc.at("params").is_object()) throw ScenarioError("scenario.params must be a map");
    s.params = doc.at("params");
  }
  return s;
}

Scenario load_scenario_text(const std::string& text) { return scenario_from_json(yaml_to_json(text)); }

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot read scenario file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario_text(buf.str());
}

const json& Params::raw(const std::string& key) const {
  if (!has(key)) throw ScenarioError("missing " + where_ + "." + key);
  return j_.at(key);
}

double Params::number(const std::string& key) const {
  const auto& v = raw(key);
  if (!v.is_number()) throw ScenarioError(where_ + "." + key + " must be a number");
  return v.get<double>();
}

namespace {

std::size_t to_count(const json& v, const std::string& label) {
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0 && d == std::floor(d) && d < 1e18) return static_cast<std::size_t>(d);
  } else if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)) {
    return v.get<std::size_t>();
  }
  throw ScenarioError(label + " must be a non-negative integer");
}

}  // namespace

std::size_t Params::count(const std::string& key) const { return to_count(raw(key), where_ + "." + key); }

std::string Params::text(const std::string& key) const {
  const auto& v = raw(key);
  if (!v.is_string()) throw ScenarioError(where_ + "." + key + " must be a string");
  return v.get<std::string>();
}

bool Params::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto& v = raw(key);
  if (!v.is_boolean()) throw ScenarioError(where_ + "." + key + " must be true or false");
  return v.get<bool>();
}

std::vector<double> Params::numbers(const std::string& key) const {
  const auto& v = raw(key);
  if (!v.is_array()) throw ScenarioError(where_ + "." + key + " must be a list of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ScenarioError(where_ + "." + key + " must be a list of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::size_t> Params::counts(const std::string& key) const {
  const auto& v = raw(key);
  if (!v.is_array()) throw ScenarioError(where_ + "." + key + " must be a list of integers");
  std::vector<std::size_t> out;
  for (const auto& x : v) out.push_back(to_count(x, where_ + "." + key + "[]"));
  return out;
}

}  // namespace qrdm::cli
