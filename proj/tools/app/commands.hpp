#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "app/config.hpp"

namespace kinexch::app {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Runs cfg.command, writing every output plus manifest.json under cfg.out.
/// Progress and check lines go to `log`. Returns the checks the command
/// evaluated; the caller decides whether they gate the exit code.
std::vector<CheckResult> run_command(const Config& cfg, std::ostream& log);

}  // namespace kinexch::app
