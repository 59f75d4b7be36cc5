#include "labandit/cli/run_config.hpp"

#include <array>
#include <cmath>

#include "labandit/errors.hpp"

namespace labandit::cli {

namespace {

constexpr std::array<const char*, 7> kSubcommands = {
    "value", "density", "obm-sample", "dp", "simulate", "posterior", "converge"};

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

template <typename T>
void read_optional(const nlohmann::json& j, const char* key, std::optional<T>& field) {
  if (j.contains(key) && !j.at(key).is_null()) field = j.at(key).get<T>();
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

nlohmann::json to_json(const RunConfig& cfg) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json();
  };
  return {
      {"subcommand", cfg.subcommand},
      {"env", cfg.env},
      {"utility", cfg.utility},
      {"c", cfg.c},
      {"sigma_low", cfg.sigma_low},
      {"sigma_high", cfg.sigma_high},
      {"phi1", cfg.phi1},
      {"method", cfg.method},
      {"y_min", cfg.y_min},
      {"y_max", cfg.y_max},
      {"points", cfg.points},
      {"transition_t", cfg.transition_t},
      {"transition_x", cfg.transition_x},
      {"transition_s", opt(cfg.transition_s)},
      {"start", cfg.start},
      {"t_end", cfg.t_end},
      {"steps", cfg.steps},
      {"n", cfg.n},
      {"indicator_c", opt(cfg.indicator_c)},
      {"strategy", cfg.strategy},
      {"horizon_c", cfg.horizon_c},
      {"dump_table", cfg.dump_table},
      {"timing", cfg.timing},
      {"state_cap", cfg.state_cap},
      {"reps", cfg.reps},
      {"seed", cfg.seed},
      {"scaling", cfg.scaling},
      {"persistence_n", cfg.persistence_n},
      {"per_rep_csv", cfg.per_rep_csv},
      {"truth", cfg.truth},
      {"n_grid", cfg.n_grid},
      {"threads", cfg.threads},
      {"output", cfg.output},
      {"format", cfg.format},
  };
}

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("run config must be a JSON object");
  RunConfig cfg;
  try {
    read_field(j, "subcommand", cfg.subcommand);
    read_field(j, "env", cfg.env);
    read_field(j, "utility", cfg.utility);
    read_field(j, "c", cfg.c);
    read_field(j, "sigma_low", cfg.sigma_low);
    read_field(j, "sigma_high", cfg.sigma_high);
    read_field(j, "phi1", cfg.phi1);
    read_field(j, "method", cfg.method);
    read_field(j, "y_min", cfg.y_min);
    read_field(j, "y_max", cfg.y_max);
    read_field(j, "points", cfg.points);
    read_field(j, "transition_t", cfg.transition_t);
    read_field(j, "transition_x", cfg.transition_x);
    read_optional(j, "transition_s", cfg.transition_s);
    read_field(j, "start", cfg.start);
    read_field(j, "t_end", cfg.t_end);
    read_field(j, "steps", cfg.steps);
    read_field(j, "n", cfg.n);
    read_optional(j, "indicator_c", cfg.indicator_c);
    read_field(j, "strategy", cfg.strategy);
    read_field(j, "horizon_c", cfg.horizon_c);
    read_field(j, "dump_table", cfg.dump_table);
    read_field(j, "timing", cfg.timing);
    read_field(j, "state_cap", cfg.state_cap);
    read_field(j, "reps", cfg.reps);
    read_field(j, "seed", cfg.seed);
    read_field(j, "scaling", cfg.scaling);
    read_field(j, "persistence_n", cfg.persistence_n);
    read_field(j, "per_rep_csv", cfg.per_rep_csv);
    read_field(j, "truth", cfg.truth);
    read_field(j, "n_grid", cfg.n_grid);
    read_field(j, "threads", cfg.threads);
    read_field(j, "output", cfg.output);
    read_field(j, "format", cfg.format);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("run config: ") + e.what());
  }
  return cfg;
}

void validate_config(const RunConfig& cfg) {
  bool known = false;
  for (const char* s : kSubcommands) known = known || cfg.subcommand == s;
  require(known, "unknown subcommand '" + cfg.subcommand + "'");
  require(cfg.format == "json" || cfg.format == "csv", "--format must be json or csv");
  require(std::isfinite(cfg.c), "--c must be finite");

  const std::string& sub = cfg.subcommand;
  if (sub == "value" || sub == "density" || sub == "obm-sample") {
    require(positive_finite(cfg.sigma_low) && positive_finite(cfg.sigma_high),
            "--sigma-low and --sigma-high must be positive");
    require(cfg.sigma_low <= cfg.sigma_high, "--sigma-low must not exceed --sigma-high");
  }
  if (sub == "value") {
    require(cfg.method == "quadrature" || cfg.method == "closed-form",
            "--method must be quadrature or closed-form");
  }
  if (sub == "density") {
    require(std::isfinite(cfg.y_min) && std::isfinite(cfg.y_max) && cfg.y_min < cfg.y_max,
            "density needs --y-min < --y-max");
    require(cfg.points >= 2, "density needs --points >= 2");
    if (cfg.transition_s) {
      require(*cfg.transition_s > cfg.transition_t, "density needs --s > --t");
    }
  }
  if (sub == "obm-sample") {
    require(positive_finite(cfg.t_end), "--t-end must be positive");
    require(cfg.steps >= 1, "--steps must be at least 1");
  }
  if (sub == "dp" || sub == "simulate" || sub == "posterior" || sub == "converge") {
    require(!cfg.env.empty(), sub + " needs --env");
  }
  if (sub == "dp" || sub == "simulate" || sub == "posterior") {
    require(cfg.n >= 1, sub + " needs --n >= 1");
  }
  if (sub == "dp") {
    require(cfg.indicator_c || !cfg.utility.empty(), "dp needs --utility or --indicator-c");
    require(!(cfg.indicator_c && !cfg.strategy.empty()),
            "--indicator-c and --strategy are exclusive");
    require(positive_finite(cfg.state_cap), "--state-cap must be positive");
    if (cfg.indicator_c) require(std::isfinite(*cfg.indicator_c), "--indicator-c must be finite");
  }
  if (sub == "simulate" || sub == "posterior") {
    require(cfg.reps >= 1, sub + " needs --reps >= 1");
  }
  if (sub == "simulate") {
    require(cfg.scaling == "sqrt" || cfg.scaling == "linear", "--scaling must be sqrt or linear");
  }
  if (sub == "posterior") {
    require(cfg.truth == "a_is_low" || cfg.truth == "a_is_high" || cfg.truth == "subjective",
            "--truth must be a_is_low, a_is_high or subjective");
  }
}

}  // namespace labandit::cli
