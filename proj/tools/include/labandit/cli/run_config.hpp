#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace labandit::cli {

/// Everything one invocation needs. Fields not used by the chosen
/// subcommand keep their defaults.
struct RunConfig {
  std::string subcommand;

  // Environment and utility: inline JSON or a path to a JSON file.
  std::string env;
  std::string utility;

  // value / density / obm-sample / converge
  double c = 0.0;
  double sigma_low = 0.5;
  double sigma_high = 1.0;
  std::string phi1 = "exponential";
  std::string method = "quadrature";

  // density: time-1 law unless transition_s is set, then q(t, x; s, y).
  double y_min = -4.0;
  double y_max = 4.0;
  std::size_t points = 161;
  double transition_t = 0.0;
  double transition_x = 0.0;
  std::optional<double> transition_s;

  // obm-sample
  double start = 0.0;
  double t_end = 1.0;
  std::size_t steps = 2048;

  // dp / simulate / posterior
  std::size_t n = 0;
  std::optional<double> indicator_c;
  std::string strategy;
  double horizon_c = 0.0;
  std::string dump_table;
  bool timing = true;
  double state_cap = 1e8;

  std::size_t reps = 100000;
  std::uint64_t seed = 0;
  std::string scaling = "sqrt";
  std::size_t persistence_n = 10;
  std::string per_rep_csv;
  std::string truth = "a_is_low";

  // converge
  std::string n_grid = "16..16384";

  unsigned threads = 0;
  std::string output;
  std::string format = "json";
};

nlohmann::json to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j);

/// Range and consistency checks that need no computation. Throws
/// ValidationError.
void validate_config(const RunConfig& cfg);

}  // namespace labandit::cli
