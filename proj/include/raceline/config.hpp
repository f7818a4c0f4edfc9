// Copyright 2026 The Raceline Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RACELINE_CONFIG_HPP
#define RACELINE_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "raceline/baseline.hpp"
#include "raceline/bayesopt.hpp"
#include "raceline/errors.hpp"
#include "raceline/speed_profile.hpp"
#include "raceline/track.hpp"

namespace raceline {

// ---------------------------------------------------------------------------
// TOML-style key/value files
// ---------------------------------------------------------------------------

namespace detail {

inline std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

inline nlohmann::json parse_scalar(const std::string& text, const std::string& source, std::size_t line) {
  if (text.empty()) throw ParseError(source, line, "missing value");
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"') throw ParseError(source, line, "unterminated string");
    return text.substr(1, text.size() - 2);
  }
  if (text == "true") return true;
  if (text == "false") return false;
  std::size_t used = 0;
  try {
    if (text.find_first_of(".eE") == std::string::npos) {
      const long long v = std::stoll(text, &used);
      if (used == text.size()) return v;
    }
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError(source, line, "cannot parse value '" + text + "'");
}

}  // namespace detail

/// Parses `key = value` lines grouped by `[section]` headers into a nested
/// JSON object. Values are quoted strings, integers, floats, booleans or
/// single-line arrays of those.
inline nlohmann::json parse_toml(std::istream& in, const std::string& source = "<config>") {
  nlohmann::json root = nlohmann::json::object();
  nlohmann::json* table = &root;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::trim(detail::strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(source, line_no, "malformed section header");
      const std::string name = detail::trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw ParseError(source, line_no, "empty section name");
      if (root.contains(name)) throw ParseError(source, line_no, "duplicate section [" + name + "]");
      root[name] = nlohmann::json::object();
      table = &root[name];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, line_no, "expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(source, line_no, "missing key");
    if (table->contains(key)) throw ParseError(source, line_no, "duplicate key '" + key + "'");
    if (!value.empty() && value.front() == '[') {
      if (value.back() != ']') throw ParseError(source, line_no, "unterminated array");
      nlohmann::json arr = nlohmann::json::array();
      std::stringstream items(value.substr(1, value.size() - 2));
      std::string item;
      while (std::getline(items, item, ',')) {
        item = detail::trim(item);
        if (!item.empty()) arr.push_back(detail::parse_scalar(item, source, line_no));
      }
      (*table)[key] = std::move(arr);
    } else {
      (*table)[key] = detail::parse_scalar(value, source, line_no);
    }
  }
  return root;
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct RunConfig {
  std::filesystem::path track;
  bool closed = true;
  VehicleParams vehicle{};
  int nodes = 20;
  int resample = 100;
  double v0 = 0.0;  // m/s at the start line
  OptConfig optimizer{};
  int runs = 10;
  std::vector<std::string> methods{"ei", "nei", "random"};
  int jobs = 1;
  std::filesystem::path out = "out";

  void validate() const {
    if (track.empty()) throw ValidationError("config: no track file given");
    if (!std::filesystem::exists(track)) throw ValidationError("config: track file not found: " + track.string());
    vehicle.validate();
    if (nodes < kMinNodes || nodes > kMaxNodes) {
      throw ValidationError("config: nodes must be in [" + std::to_string(kMinNodes) + ", " + std::to_string(kMaxNodes) + "]");
    }
    if (resample < kMinResample) throw ValidationError("config: resample must be >= " + std::to_string(kMinResample));
    if (!(v0 >= 0.0)) throw ValidationError("config: v0 must be >= 0");
    optimizer.validate();
    if (runs < 2) throw ValidationError("config: runs must be >= 2 (bands need two runs)");
    if (jobs < 1) throw ValidationError("config: jobs must be >= 1");
    if (methods.empty()) throw ValidationError("config: no methods given");
    for (const auto& m : methods) parse_method(m);
  }
};

inline AcquisitionKind parse_acquisition(const std::string& s) {
  if (s == "ei") return AcquisitionKind::kEI;
  if (s == "nei") return AcquisitionKind::kNEI;
  throw ValidationError("unknown acquisition '" + s + "' (valid: ei, nei)");
}

inline ConvergenceMode parse_convergence(const std::string& s) {
  if (s == "fixed_budget") return ConvergenceMode::kFixedBudget;
  if (s == "no_improvement") return ConvergenceMode::kNoImprovement;
  throw ValidationError("unknown convergence mode '" + s + "' (valid: fixed_budget, no_improvement)");
}

inline std::vector<std::string> split_methods(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = detail::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

namespace detail {

template <typename T>
T config_value(const nlohmann::json& table, const std::string& section, const std::string& key) {
  const nlohmann::json& v = table.at(key);
  const std::string name = section.empty() ? key : section + "." + key;
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ValidationError("");
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!v.is_number_integer()) throw ValidationError("");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ValidationError("");
    } else {
      if (!v.is_string()) throw ValidationError("");
    }
    return v.get<T>();
  } catch (const std::exception&) {
    throw ValidationError("config: '" + name + "' has the wrong type");
  }
}

template <typename T>
void read_if(const nlohmann::json& table, const std::string& section, const std::string& key, T& out) {
  if (table.contains(key)) out = config_value<T>(table, section, key);
}

inline void reject_unknown(const nlohmann::json& table, const std::string& section, std::initializer_list<const char*> known) {
  for (const auto& [k, v] : table.items()) {
    bool ok = false;
    for (const char* name : known) ok = ok || k == name;
    if (!ok) throw ValidationError("config: unknown key '" + (section.empty() ? k : section + "." + k) + "'");
  }
}

}  // namespace detail

/// Builds a RunConfig from the nested key/value form. A relative track path
/// is resolved against `base_dir`; the output directory is used as given.
inline RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  RunConfig c;
  if (!j.is_object()) throw ValidationError("config: expected a table of keys");
  detail::reject_unknown(j, "", {"track", "closed", "nodes", "resample", "v0", "out", "vehicle", "optimizer", "compare"});
  std::string track, out;
  detail::read_if(j, "", "track", track);
  detail::read_if(j, "", "out", out);
  if (!track.empty()) c.track = std::filesystem::path(track).is_absolute() ? std::filesystem::path(track) : base_dir / track;
  if (!out.empty()) c.out = out;
  detail::read_if(j, "", "closed", c.closed);
  detail::read_if(j, "", "nodes", c.nodes);
  detail::read_if(j, "", "resample", c.resample);
  detail::read_if(j, "", "v0", c.v0);

  if (j.contains("vehicle")) {
    const auto& v = j.at("vehicle");
    detail::reject_unknown(v, "vehicle", {"mass", "l_f", "l_r", "mu_s", "g", "v_cap"});
    detail::read_if(v, "vehicle", "mass", c.vehicle.mass);
    detail::read_if(v, "vehicle", "l_f", c.vehicle.l_front);
    detail::read_if(v, "vehicle", "l_r", c.vehicle.l_rear);
    detail::read_if(v, "vehicle", "mu_s", c.vehicle.mu_s);
    detail::read_if(v, "vehicle", "g", c.vehicle.gravity);
    detail::read_if(v, "vehicle", "v_cap", c.vehicle.v_cap);
  }
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    detail::reject_unknown(o, "optimizer", {"n_init", "budget", "acquisition", "nei_fantasies", "acq_restarts", "acq_candidates", "seed",
                                            "convergence", "patience", "min_delta", "kernel", "gp_restarts"});
    OptConfig& oc = c.optimizer;
    detail::read_if(o, "optimizer", "n_init", oc.n_init);
    detail::read_if(o, "optimizer", "budget", oc.budget);
    detail::read_if(o, "optimizer", "nei_fantasies", oc.nei_fantasies);
    detail::read_if(o, "optimizer", "acq_restarts", oc.acq_restarts);
    detail::read_if(o, "optimizer", "acq_candidates", oc.acq_candidates);
    detail::read_if(o, "optimizer", "seed", oc.rng_seed);
    detail::read_if(o, "optimizer", "patience", oc.patience);
    detail::read_if(o, "optimizer", "min_delta", oc.min_delta);
    detail::read_if(o, "optimizer", "gp_restarts", oc.gp.restarts);
    if (o.contains("acquisition")) oc.acquisition = parse_acquisition(detail::config_value<std::string>(o, "optimizer", "acquisition"));
    if (o.contains("convergence")) oc.convergence = parse_convergence(detail::config_value<std::string>(o, "optimizer", "convergence"));
    if (o.contains("kernel")) {
      const auto s = detail::config_value<std::string>(o, "optimizer", "kernel");
      if (s != "isotropic" && s != "ard") throw ValidationError("config: optimizer.kernel must be 'isotropic' or 'ard'");
      oc.gp.ard = s == "ard";
    }
  }
  if (j.contains("compare")) {
    const auto& m = j.at("compare");
    detail::reject_unknown(m, "compare", {"runs", "methods", "jobs"});
    detail::read_if(m, "compare", "runs", c.runs);
    detail::read_if(m, "compare", "jobs", c.jobs);
    if (m.contains("methods")) {
      const auto& v = m.at("methods");
      if (v.is_string()) {
        c.methods = split_methods(v.get<std::string>());
      } else if (v.is_array()) {
        c.methods.clear();
        for (const auto& e : v) {
          if (!e.is_string()) throw ValidationError("config: 'compare.methods' must list strings");
          c.methods.push_back(e.get<std::string>());
        }
      } else {
        throw ValidationError("config: 'compare.methods' has the wrong type");
      }
    }
  }
  return c;
}

/// Effective configuration in the nested key/value form, suitable for
/// `config_from_json`. Paths are written as absolute paths.
inline nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["track"] = std::filesystem::absolute(c.track).lexically_normal().string();
  j["closed"] = c.closed;
  j["nodes"] = c.nodes;
  j["resample"] = c.resample;
  j["v0"] = c.v0;
  j["out"] = std::filesystem::absolute(c.out).lexically_normal().string();
  j["vehicle"] = {{"mass", c.vehicle.mass}, {"l_f", c.vehicle.l_front}, {"l_r", c.vehicle.l_rear},
                  {"mu_s", c.vehicle.mu_s}, {"g", c.vehicle.gravity},   {"v_cap", c.vehicle.v_cap}};
  const OptConfig& o = c.optimizer;
  j["optimizer"] = {{"n_init", o.n_init},
                    {"budget", o.budget},
                    {"acquisition", to_string(o.acquisition)},
                    {"nei_fantasies", o.nei_fantasies},
                    {"acq_restarts", o.acq_restarts},
                    {"acq_candidates", o.acq_candidates},
                    {"seed", o.rng_seed},
                    {"convergence", to_string(o.convergence)},
                    {"patience", o.patience},
                    {"min_delta", o.min_delta},
                    {"kernel", o.gp.ard ? "ard" : "isotropic"},
                    {"gp_restarts", o.gp.restarts}};
  j["compare"] = {{"runs", c.runs}, {"methods", c.methods}, {"jobs", c.jobs}};
  return j;
}

/// Reads a TOML-style config file, or a JSON file such as a previous run's
/// summary (its `config` member is used).
inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config file not found: " + path.string());
  const std::filesystem::path base = path.parent_path();
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path.string(), 0, e.what());
    }
    return config_from_json(j.contains("config") ? j.at("config") : j, base);
  }
  std::istringstream is(text);
  return config_from_json(parse_toml(is, path.string()), base);
}

}  // namespace raceline

#endif  // RACELINE_CONFIG_HPP
