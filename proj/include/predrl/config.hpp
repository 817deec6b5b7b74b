#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "predrl/agents.hpp"
#include "predrl/experiments.hpp"
#include "predrl/simulator.hpp"

namespace predrl {

/// Malformed or invalid configuration; the message names the key and line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  SweepBase base;
  SweepGrid grid;
  std::string preset{"horizon"};
  std::string output_dir{"out"};
  int jobs{1};
  double max_diverged_fraction{0.1};
  CiMethod ci{CiMethod::Normal};

  /// Re-derives the grid axes from `preset` and the fixed values.
  void apply_preset(std::string_view name);
  void validate() const;
};

RunConfig default_run_config();

/// Parses YAML text; unknown keys and bad values raise ConfigError.
RunConfig parse_run_config(std::string_view yaml, std::string_view source = "<config>");
RunConfig load_run_config(const std::string& path);

/// The full default configuration as YAML (what config/default.yaml holds).
std::string default_config_yaml();

}  // namespace predrl
