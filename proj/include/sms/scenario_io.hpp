#pragma once

#include <string>

#include "sms/sim.hpp"
#include "sms/tomlmini.hpp"

namespace sms {

struct ScenarioParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses a scenario config (format marker "sms-scenario-v1").  `origin` is
/// used in error messages and, when it names a file, as the base directory
/// for resolving a relative model path.
ScenarioConfig parse_scenario_config(const toml::Value& root, const std::string& origin);

ScenarioConfig load_scenario_config(const std::string& path);

/// The inverse of parsing; round-trips every field value-exactly.
std::string serialize_scenario_config(const ScenarioConfig& config);
void save_scenario_config(const ScenarioConfig& config, const std::string& path);

}  // namespace sms
