#include "app/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "kinexch/errors.hpp"
#include "kinexch/meanfield.hpp"

namespace kinexch::app {

using nlohmann::json;

namespace {

enum class Kind { Real, Int, UInt, Text, IntList, Flag };

const std::map<std::string, Kind>& key_kinds() {
  static const std::map<std::string, Kind> kinds = {
      {"model", Kind::Text},         {"lambda", Kind::Real},          {"n_agents", Kind::Int},
      {"mu", Kind::Int},             {"dt", Kind::Real},              {"n_max", Kind::UInt},
      {"t_end", Kind::Real},         {"seed", Kind::UInt},            {"replicas", Kind::UInt},
      {"snapshots", Kind::UInt},     {"init", Kind::Text},            {"event_log", Kind::Flag},
      {"part", Kind::Text},          {"n_values", Kind::IntList},     {"k", Kind::UInt},
      {"coupling_n_values", Kind::IntList}, {"coupling_t_end", Kind::Real},
  };
  return kinds;
}

const std::map<std::string, std::vector<std::string>>& command_keys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"abm", {"model", "lambda", "n_agents", "mu", "t_end", "seed", "snapshots", "event_log"}},
      {"ode", {"model", "lambda", "mu", "dt", "n_max", "t_end", "snapshots", "init"}},
      {"wave", {"lambda", "mu", "dt", "n_max", "t_end", "snapshots"}},
      {"chaos", {"model", "lambda", "mu", "t_end", "seed", "replicas", "part", "n_values", "k", "coupling_n_values",
                 "coupling_t_end"}},
      {"selftest", {"seed"}},
  };
  return keys;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw InvalidArgument("--" + key + ": cannot parse '" + text + "'");
  return value;
}

template <typename T>
T get(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw InvalidArgument("config key '" + key + "' has the wrong type");
  }
}

}  // namespace

const std::vector<std::string>& Config::keys() const {
  const auto it = command_keys().find(command);
  if (it == command_keys().end()) throw InvalidArgument("unknown command '" + command + "'");
  return it->second;
}

std::vector<Model> Config::models() const {
  if (model == "all") return {Model::Unbiased, Model::PoorBiased, Model::RichBiased};
  return {parse_model(model)};
}

ModelParams Config::params(Model m) const {
  ModelParams p;
  p.model = m;
  p.lambda = lambda;
  p.n_agents = n_agents;
  p.mu = mu;
  p.seed = seed;
  return p;
}

void Config::validate() const {
  if (model == "all" && command != "abm") throw InvalidArgument("--model all is only supported by abm");
  for (Model m : models()) {
    ModelParams p = params(m);
    if (command != "abm") p.n_agents = std::max<std::int64_t>(p.n_agents, 2);
    p.validate();
  }
  // the chaos scan accepts t = 0, where every empirical error is exactly 0
  if (command == "chaos" ? !(t_end >= 0.0) : !(t_end > 0.0)) throw InvalidArgument("t_end must be > 0");
  if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
  if (snapshots < 1) throw InvalidArgument("snapshots must be >= 1");
  if (replicas < 1) throw InvalidArgument("replicas must be >= 1");
  if (init != "dirac" && init != "equilibrium") throw InvalidArgument("init must be dirac or equilibrium");
  if (init == "equilibrium" && model == "rich-biased") {
    throw InvalidArgument("the rich-biased model has no equilibrium with mean mu > 0");
  }
  if (part != "scaling" && part != "coupling" && part != "both") {
    throw InvalidArgument("part must be scaling, coupling or both");
  }
  if (command == "chaos") {
    const auto increasing = [](const std::vector<std::int64_t>& v) {
      return !v.empty() && std::is_sorted(v.begin(), v.end()) && std::adjacent_find(v.begin(), v.end()) == v.end() &&
             v.front() >= 2;
    };
    if (part != "coupling" && !increasing(n_values)) throw InvalidArgument("n_values must be increasing and >= 2");
    if (part != "scaling") {
      if (!increasing(coupling_n_values)) throw InvalidArgument("coupling_n_values must be increasing and >= 2");
      if (k < 1 || static_cast<std::int64_t>(k) > coupling_n_values.front()) {
        throw InvalidArgument("k must lie in [1, smallest coupling N]");
      }
      if (!(coupling_t_end > 0.0)) throw InvalidArgument("coupling_t_end must be > 0");
    }
  }
}

Config defaults(const std::string& command, const std::optional<std::string>& model) {
  Config c;
  c.command = command;
  (void)c.keys();  // rejects unknown commands
  if (command == "abm") {
    c.model = model.value_or("all");
    c.t_end = 100.0;
    c.snapshots = 100;
  } else if (command == "ode") {
    c.model = model.value_or("poor-biased");
    c.mu = 5;
    const Model m = parse_model(c.model);
    c.model = std::string(to_string(m));
    c.dt = m == Model::RichBiased ? 5e-3 : 0.01;
    c.t_end = m == Model::PoorBiased ? 12.0 : m == Model::RichBiased ? 500.0 : 100.0;
    c.snapshots = m == Model::PoorBiased ? 120 : 100;
  } else if (command == "wave") {
    c.model = "rich-biased";
    c.mu = 5;
    c.dt = 5e-3;
    c.n_max = 1000;
    c.t_end = 500.0;
    c.snapshots = 500;
  } else if (command == "chaos") {
    c.model = model.value_or("rich-biased");
    c.mu = 5;
    c.t_end = 1.0;
    c.n_values = {100, 316, 1000, 3162, 10000};
    c.coupling_n_values = {250, 500, 1000, 2000};
  } else {
    c.model = "unbiased";
  }
  if (c.model != "all") c.model = std::string(to_string(parse_model(c.model)));
  return c;
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  // CSV outputs start with "# config {...}", SVG outputs carry it in a comment
  for (const std::string marker : {"# config ", "<!-- config "}) {
    const auto pos = text.find(marker);
    if (pos != std::string::npos) {
      const auto start = pos + marker.size();
      const auto stop = text.find('\n', start);
      text = text.substr(start, stop == std::string::npos ? std::string::npos : stop - start);
      if (marker[0] == '<') text = text.substr(0, text.rfind("-->"));
      break;
    }
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (j.is_object() && j.contains("config")) j = j["config"];
  if (!j.is_object()) throw InvalidArgument("config file '" + path + "' must hold a JSON object");
  return j;
}

json parse_flag_value(const std::string& key, const std::string& text) {
  const auto it = key_kinds().find(key);
  if (it == key_kinds().end()) throw InvalidArgument("unknown option '" + key + "'");
  switch (it->second) {
    case Kind::Real:
      return parse_number<double>(key, text);
    case Kind::Int:
      return parse_number<std::int64_t>(key, text);
    case Kind::UInt:
      return parse_number<std::uint64_t>(key, text);
    case Kind::Text:
      return text;
    case Kind::Flag:
      return text == "true" || text == "1";
    case Kind::IntList: {
      json list = json::array();
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) list.push_back(parse_number<std::int64_t>(key, item));
      return list;
    }
  }
  return {};
}

Config resolve(const std::string& command, const json& file, const json& flags, const char* env_seed) {
  json merged = file;
  if (merged.contains("command")) {
    if (merged["command"] != command) {
      throw InvalidArgument("config file is for command '" + get<std::string>(merged["command"], "command") + "'");
    }
    merged.erase("command");
  }
  for (const auto& [key, value] : flags.items()) merged[key] = value;

  std::optional<std::string> model;
  if (merged.contains("model")) model = get<std::string>(merged["model"], "model");
  Config c = defaults(command, model);
  const auto& allowed = c.keys();
  for (const auto& [key, value] : merged.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw InvalidArgument("option '" + key + "' does not apply to " + command);
    }
    if (key == "model") {
      const auto name = get<std::string>(value, key);
      c.model = name == "all" ? name : std::string(to_string(parse_model(name)));
    } else if (key == "lambda") c.lambda = get<double>(value, key);
    else if (key == "n_agents") c.n_agents = get<std::int64_t>(value, key);
    else if (key == "mu") c.mu = get<Dollars>(value, key);
    else if (key == "dt") c.dt = get<double>(value, key);
    else if (key == "n_max") c.n_max = get<std::size_t>(value, key);
    else if (key == "t_end") c.t_end = get<double>(value, key);
    else if (key == "seed") c.seed = get<std::uint64_t>(value, key);
    else if (key == "replicas") c.replicas = get<std::size_t>(value, key);
    else if (key == "snapshots") c.snapshots = get<std::size_t>(value, key);
    else if (key == "init") c.init = get<std::string>(value, key);
    else if (key == "event_log") c.event_log = get<bool>(value, key);
    else if (key == "part") c.part = get<std::string>(value, key);
    else if (key == "n_values") c.n_values = get<std::vector<std::int64_t>>(value, key);
    else if (key == "k") c.k = get<std::size_t>(value, key);
    else if (key == "coupling_n_values") c.coupling_n_values = get<std::vector<std::int64_t>>(value, key);
    else if (key == "coupling_t_end") c.coupling_t_end = get<double>(value, key);
  }
  if (!merged.contains("seed") && env_seed != nullptr && *env_seed != '\0') {
    c.seed = parse_flag_value("seed", env_seed).get<std::uint64_t>();
  }
  c.validate();
  return c;
}

json to_json(const Config& c) {
  json j;
  j["command"] = c.command;
  for (const auto& key : c.keys()) {
    if (key == "model") j[key] = c.model;
    else if (key == "lambda") j[key] = c.lambda;
    else if (key == "n_agents") j[key] = c.n_agents;
    else if (key == "mu") j[key] = c.mu;
    else if (key == "dt") j[key] = c.dt;
    else if (key == "n_max") j[key] = c.n_max;
    else if (key == "t_end") j[key] = c.t_end;
    else if (key == "seed") j[key] = c.seed;
    else if (key == "replicas") j[key] = c.replicas;
    else if (key == "snapshots") j[key] = c.snapshots;
    else if (key == "init") j[key] = c.init;
    else if (key == "event_log") j[key] = c.event_log;
    else if (key == "part") j[key] = c.part;
    else if (key == "n_values") j[key] = c.n_values;
    else if (key == "k") j[key] = c.k;
    else if (key == "coupling_n_values") j[key] = c.coupling_n_values;
    else if (key == "coupling_t_end") j[key] = c.coupling_t_end;
  }
  return j;
}

}  // namespace kinexch::app
