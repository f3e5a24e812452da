#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kinexch/types.hpp"

namespace kinexch::app {

/// Resolved parameters of one CLI run. Which fields matter depends on the
/// command; `to_json` emits exactly those.
struct Config {
  std::string command;
  std::string model;  ///< a model name, or "all" for abm
  double lambda = 1.0;
  std::int64_t n_agents = 500;
  Dollars mu = 10;
  double dt = 0.01;
  std::size_t n_max = 0;  ///< 0: automatic
  double t_end = 1.0;
  std::uint64_t seed = 42;
  std::size_t replicas = 100;
  std::size_t snapshots = 100;
  std::string init = "dirac";  ///< ode: dirac | equilibrium
  bool event_log = false;
  // chaos
  std::string part = "both";  ///< scaling | coupling | both
  std::vector<std::int64_t> n_values;
  std::size_t k = 10;
  std::vector<std::int64_t> coupling_n_values;
  double coupling_t_end = 5.0;

  // run controls, not part of the reproducible config
  std::string out = "out";
  unsigned jobs = 0;
  bool check = false;

  /// Keys accepted (and emitted) for this command.
  const std::vector<std::string>& keys() const;
  std::vector<Model> models() const;
  ModelParams params(Model model) const;
  void validate() const;
};

/// Command defaults; some depend on the model (ode and wave step sizes).
Config defaults(const std::string& command, const std::optional<std::string>& model);

/// Reads a config from a JSON object, a file holding one (or an emitted
/// report with a "config" member), or a CSV/SVG output's config line.
nlohmann::json load_config_file(const std::string& path);

/// Converts a flag's text to the JSON type of `key`.
nlohmann::json parse_flag_value(const std::string& key, const std::string& text);

/// defaults <- file <- flags; the seed falls back to KINEXCH_SEED when
/// neither the file nor a flag sets it.
Config resolve(const std::string& command, const nlohmann::json& file, const nlohmann::json& flags,
               const char* env_seed);

nlohmann::json to_json(const Config& cfg);

}  // namespace kinexch::app
