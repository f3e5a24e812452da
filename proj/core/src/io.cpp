#include "kinexch/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "kinexch/errors.hpp"
#include "kinexch/version.hpp"

namespace kinexch::io {
namespace {

void write_comment(std::ostream& os, std::string_view comment) {
  if (!comment.empty()) os << "# " << comment << '\n';
}

// Reads "index,value" rows after an optional header, skipping comments.
template <typename Value, typename Parse>
std::vector<Value> read_indexed_column(std::istream& is, Parse parse) {
  std::vector<Value> values;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("index", 0) == 0) continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidArgument("malformed CSV row: " + line);
    const auto index = std::stoull(line.substr(0, comma));
    if (index != values.size()) throw InvalidArgument("CSV indices must be 0, 1, 2, ...");
    values.push_back(parse(line.substr(comma + 1)));
  }
  return values;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_pmf_csv(std::ostream& os, const Pmf& pmf, std::string_view comment) {
  write_comment(os, comment);
  os << "index,value\n";
  for (std::size_t n = 0; n < pmf.size(); ++n) os << n << ',' << format_double(pmf[n]) << '\n';
}

Pmf read_pmf_csv(std::istream& is) {
  return Pmf(read_indexed_column<double>(is, [](const std::string& s) { return std::stod(s); }));
}

void write_state_csv(std::ostream& os, const WealthVector& state, std::string_view comment) {
  write_comment(os, comment);
  os << "index,value\n";
  for (std::size_t i = 0; i < state.size(); ++i) os << i << ',' << state[i] << '\n';
}

WealthVector read_state_csv(std::istream& is) {
  return WealthVector(read_indexed_column<Dollars>(
      is, [](const std::string& s) { return static_cast<Dollars>(std::stoll(s)); }));
}

void write_trajectory_pmfs_csv(std::ostream& os, const TrajectoryRecord& record,
                               std::string_view comment) {
  write_comment(os, comment);
  os << "t,n,p_n\n";
  for (std::size_t row = 0; row < record.size(); ++row) {
    const auto& pmf = record.pmf(row);
    if (!pmf) continue;
    const std::string t = format_double(record.times()[row]);
    for (std::size_t n = 0; n < pmf->size(); ++n) {
      os << t << ',' << n << ',' << format_double((*pmf)[n]) << '\n';
    }
  }
}

void write_trajectory_stats_csv(std::ostream& os, const TrajectoryRecord& record,
                                std::string_view comment) {
  write_comment(os, comment);
  os << 't';
  for (const auto& name : record.stat_names()) os << ',' << name;
  os << '\n';
  for (std::size_t row = 0; row < record.size(); ++row) {
    os << format_double(record.times()[row]);
    for (double v : record.stats(row)) os << ',' << format_double(v);
    os << '\n';
  }
}

std::string to_json(const ModelParams& params) {
  nlohmann::ordered_json j;
  j["model"] = std::string(to_string(params.model));
  j["lambda"] = params.lambda;
  j["n_agents"] = params.n_agents;
  j["mu"] = params.mu;
  j["seed"] = params.seed;
  return j.dump();
}

ModelParams model_params_from_json(std::string_view json) {
  const auto j = nlohmann::json::parse(json);
  ModelParams p;
  if (j.contains("model")) p.model = parse_model(j.at("model").get<std::string>());
  if (j.contains("lambda")) p.lambda = j.at("lambda").get<double>();
  if (j.contains("n_agents")) p.n_agents = j.at("n_agents").get<std::int64_t>();
  if (j.contains("mu")) p.mu = j.at("mu").get<Dollars>();
  if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
  p.validate();
  return p;
}

std::string pmf_envelope_json(std::string_view kind, const ModelParams& params, const Pmf& pmf) {
  nlohmann::ordered_json j;
  j["kind"] = std::string(kind);
  j["version"] = kVersion;
  j["params"] = nlohmann::ordered_json::parse(to_json(params));
  j["pmf"] = std::vector<double>(pmf.probs().begin(), pmf.probs().end());
  return j.dump(2);
}

}  // namespace kinexch::io
