#include <CLI11.hpp>

#include <cstdlib>
#include <exception>
#include <iostream>
#include <map>
#include <string>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "kinexch/errors.hpp"
#include "kinexch/version.hpp"

using namespace kinexch;

namespace {

struct Subcommand {
  CLI::App* app = nullptr;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  bool event_log = false;
  std::string config_path;
};

const std::map<std::string, std::string>& help_text() {
  static const std::map<std::string, std::string> help = {
      {"model", "unbiased | poor-biased | rich-biased (abm also accepts all)"},
      {"lambda", "exchange rate constant"},
      {"n_agents", "number of agents N"},
      {"mu", "dollars per agent"},
      {"dt", "RK4 step"},
      {"n_max", "truncation bound (0: automatic)"},
      {"t_end", "final time"},
      {"seed", "master seed (falls back to KINEXCH_SEED)"},
      {"replicas", "independent replicas per point"},
      {"snapshots", "number of recording intervals on [0, t_end]"},
      {"init", "dirac | equilibrium"},
      {"part", "scaling | coupling | both"},
      {"n_values", "comma-separated N for the scaling scan"},
      {"k", "tagged agents in the coupling"},
      {"coupling_n_values", "comma-separated N for the coupling"},
      {"coupling_t_end", "final time of the coupling"},
  };
  return help;
}

std::string flag_name(const std::string& key) {
  std::string s = key;
  for (char& c : s) c = c == '_' ? '-' : c;
  return "--" + s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinetic wealth-exchange models: agent-based simulation and limit equations"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string out = "out";
  unsigned jobs = 0;
  bool check = false;
  std::map<std::string, Subcommand> subs;
  const std::map<std::string, std::string> about = {
      {"abm", "simulate the agent-based models and record wealth distributions"},
      {"ode", "integrate a limit master equation"},
      {"wave", "track the dispersive wave of the rich-biased limit equation"},
      {"chaos", "measure propagation of chaos"},
      {"selftest", "run the fast invariant checks"},
  };
  for (const auto& [name, description] : about) {
    Subcommand& s = subs[name];
    s.app = app.add_subcommand(name, description);
    s.app->add_option("--config", s.config_path, "JSON config, report or output file carrying a config line")
        ->check(CLI::ExistingFile);
    s.app->add_option("--out", out, "output directory")->capture_default_str();
    s.app->add_option("--jobs", jobs, "worker threads (0: all hardware threads)");
    s.app->add_flag("--check", check, "verify the command's acceptance checks; nonzero exit on failure");
    for (const auto& key : app::defaults(name, std::nullopt).keys()) {
      if (key == "event_log") {
        s.options[key] = s.app->add_flag("--event-log", s.event_log, "also write every exchange as giver,receiver,t");
        continue;
      }
      const std::string names = key == "n_agents" ? "--n-agents,--n" : flag_name(key);
      const bool text = key == "model" || key == "init" || key == "part";
      const bool list = key == "n_values" || key == "coupling_n_values";
      s.options[key] = s.app->add_option(names, s.values[key], help_text().at(key))
                           ->type_name(text ? "TEXT" : list ? "N,N,..." : "NUM");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  for (auto& [name, s] : subs) {
    if (!s.app->parsed()) continue;
    try {
      nlohmann::json flags = nlohmann::json::object();
      for (const auto& [key, opt] : s.options) {
        if (opt->count() == 0) continue;
        flags[key] = key == "event_log" ? nlohmann::json(s.event_log) : app::parse_flag_value(key, s.values[key]);
      }
      const nlohmann::json file = s.config_path.empty() ? nlohmann::json::object() : app::load_config_file(s.config_path);
      app::Config cfg = app::resolve(name, file, flags, std::getenv("KINEXCH_SEED"));
      cfg.out = out;
      cfg.jobs = jobs;
      cfg.check = check || name == "selftest";

      const auto checks = app::run_command(cfg, std::cout);
      bool ok = true;
      for (const auto& c : checks) {
        if (cfg.check) std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        ok = ok && c.pass;
      }
      return cfg.check && !ok ? 1 : 0;
    } catch (const InvalidArgument& e) {
      std::cerr << "error: " << e.what() << "\n\n" << s.app->help();
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 3;
    }
  }
  return 0;
}
