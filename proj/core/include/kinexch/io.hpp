#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "kinexch/types.hpp"

namespace kinexch::io {

/// Shortest round-trip-safe text: 17 significant digits.
std::string format_double(double value);

/// Every writer below accepts an optional comment emitted as a leading
/// "# ..." line; readers skip lines starting with '#'.

/// Columns: index,value
void write_pmf_csv(std::ostream& os, const Pmf& pmf, std::string_view comment = {});
Pmf read_pmf_csv(std::istream& is);

/// Columns: index,value (value = dollars of agent `index`)
void write_state_csv(std::ostream& os, const WealthVector& state, std::string_view comment = {});
WealthVector read_state_csv(std::istream& is);

/// Long format, one row per stored pmf entry: t,n,p_n
void write_trajectory_pmfs_csv(std::ostream& os, const TrajectoryRecord& record,
                               std::string_view comment = {});

/// One row per time: t,<stat names...>
void write_trajectory_stats_csv(std::ostream& os, const TrajectoryRecord& record,
                                std::string_view comment = {});

/// JSON object with model, lambda, n_agents, mu, seed (seed as an integer).
std::string to_json(const ModelParams& params);
ModelParams model_params_from_json(std::string_view json);

/// {"kind": ..., "version": ..., "params": {...}, "pmf": [...]} envelope.
std::string pmf_envelope_json(std::string_view kind, const ModelParams& params, const Pmf& pmf);

}  // namespace kinexch::io
