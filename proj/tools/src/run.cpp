#include "labandit/cli/run.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "labandit/asymptotic_value.hpp"
#include "labandit/bandit.hpp"
#include "labandit/errors.hpp"
#include "labandit/exact_dp.hpp"
#include "labandit/montecarlo.hpp"
#include "labandit/obm.hpp"
#include "labandit/utility.hpp"

namespace labandit::cli {

namespace {

/// Shortest representation that round-trips.
std::string fmt(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

nlohmann::json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("malformed JSON in " + what + ": " + e.what());
  }
}

/// Inline JSON when the text starts with '{', otherwise a file path.
nlohmann::json load_json(const std::string& text, const std::string& what) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    return parse_json_text(text, what);
  }
  std::ifstream in(text);
  if (!in) throw ValidationError("cannot open " + what + " file '" + text + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), what + " file '" + text + "'");
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write '" + path + "'");
  return f;
}

Environment load_env(const RunConfig& cfg) {
  Environment env = env_from_json(load_json(cfg.env, "--env"));
  validate_env(env);
  return env;
}

/// --utility if given, else the exponential index with reference point c and
/// the loss-aversion coefficient coupled to the environment.
UtilityIndex load_utility(const RunConfig& cfg, const Environment& env) {
  if (!cfg.utility.empty()) return utility_from_json(load_json(cfg.utility, "--utility"));
  return make_utility(Phi1Spec::exponential(), cfg.c, env_sigma_low(env) / env_sigma_high(env));
}

Strategy load_strategy(const RunConfig& cfg, const Environment& env) {
  std::string selector = cfg.strategy;
  if (selector.empty()) {
    selector = std::holds_alternative<TwoArmedEnv>(env) ? "s_star_learning" : "s_star";
  }
  return parse_strategy(selector, env, cfg.horizon_c);
}

void emit_json(const nlohmann::json& j, std::ostream& out) { out << j.dump(2) << '\n'; }

void cmd_value(const RunConfig& cfg, std::ostream& out) {
  const auto params = ObmParams::make(cfg.sigma_low, cfg.sigma_high, cfg.c);
  const Phi1Registry registry;
  const auto u = make_utility(registry.get(cfg.phi1), cfg.c, params.theta());
  if (cfg.method == "closed-form") {
    if (u.phi1().kind != Phi1Spec::Kind::exponential) {
      throw ValidationError("closed-form value exists only for --phi1 exponential");
    }
    emit_json(to_json(value_exponential_closed_form(cfg.c, cfg.sigma_low, cfg.sigma_high)), out);
  } else {
    emit_json(to_json(value_by_quadrature(u, params)), out);
  }
}

void cmd_density(const RunConfig& cfg, std::ostream& out) {
  const auto params = ObmParams::make(cfg.sigma_low, cfg.sigma_high, cfg.c);
  std::vector<double> ys, qs;
  for (std::size_t i = 0; i < cfg.points; ++i) {
    const double y = cfg.y_min + (cfg.y_max - cfg.y_min) * static_cast<double>(i) /
                                     static_cast<double>(cfg.points - 1);
    ys.push_back(y);
    qs.push_back(cfg.transition_s ? transition_density(params, cfg.transition_t,
                                                       cfg.transition_x, *cfg.transition_s, y)
                                  : time1_pdf(params, y));
  }
  if (cfg.format == "json") {
    emit_json({{"params", to_json(params)}, {"y", ys}, {"q", qs}}, out);
    return;
  }
  out << "y,q\n";
  for (std::size_t i = 0; i < ys.size(); ++i) out << fmt(ys[i]) << ',' << fmt(qs[i]) << '\n';
}

void cmd_obm_sample(const RunConfig& cfg, std::ostream& out) {
  const auto params = ObmParams::make(cfg.sigma_low, cfg.sigma_high, cfg.c);
  if (cfg.steps > static_cast<std::size_t>(std::numeric_limits<int>::max())) {
    throw ValidationError("--steps too large");
  }
  const auto path =
      sample_path(params, cfg.start, cfg.t_end, static_cast<int>(cfg.steps), cfg.seed);
  if (cfg.format == "json") {
    emit_json({{"params", to_json(params)}, {"seed", path.seed}, {"t", path.times},
               {"w", path.values}},
              out);
    return;
  }
  out << "t,W_t\n";
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    out << fmt(path.times[i]) << ',' << fmt(path.values[i]) << '\n';
  }
}

void cmd_dp(const RunConfig& cfg, std::ostream& out) {
  const Environment env = load_env(cfg);
  DpOptions options;
  options.state_cap = static_cast<std::size_t>(cfg.state_cap);
  options.keep_table = !cfg.dump_table.empty();
  if (options.keep_table && (cfg.indicator_c || !cfg.strategy.empty())) {
    throw ValidationError("--dump-table applies to the optimal value only");
  }

  const auto started = std::chrono::steady_clock::now();
  nlohmann::json j{{"n", cfg.n}};
  if (cfg.indicator_c) {
    const auto r = upper_indicator_prob_n(env, *cfg.indicator_c, cfg.n, options);
    j["quantity"] = "upper_indicator_prob";
    j["c"] = *cfg.indicator_c;
    j["value"] = r.value;
    j["atoms_at_boundary"] = r.boundary_is_lattice_point;
  } else {
    const auto u = load_utility(cfg, env);
    if (!cfg.strategy.empty()) {
      const auto s = load_strategy(cfg, env);
      j["quantity"] = "strategy_value";
      j["strategy"] = s.selector(env);
      j["value"] = strategy_value_n(env, s, u, cfg.n, options);
    } else {
      const auto r = value_n(env, u, cfg.n, options);
      j["quantity"] = "value_n";
      j["value"] = r.value;
      if (options.keep_table) {
        auto f = open_output(cfg.dump_table);
        r.table.write_csv(f);
      }
    }
    j["atoms_at_boundary"] = false;
  }
  if (cfg.timing) {
    const auto elapsed = std::chrono::steady_clock::now() - started;
    j["runtime_ms"] = std::chrono::duration<double, std::milli>(elapsed).count();
  }
  emit_json(j, out);
}

void cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const Environment env = load_env(cfg);
  const auto u = load_utility(cfg, env);
  const auto s = load_strategy(cfg, env);
  SimOptions options;
  options.scaling = parse_scaling(cfg.scaling);
  options.persistence_n = cfg.persistence_n;
  options.threads = cfg.threads;
  options.indicator_c = cfg.indicator_c.value_or(0.0);
  options.keep_per_rep = !cfg.per_rep_csv.empty();
  const auto report = simulate_paths(env, s, u, cfg.n, cfg.reps, cfg.seed, options);
  emit_json(to_json(report), out);
  if (options.keep_per_rep) {
    auto f = open_output(cfg.per_rep_csv);
    f << "rep,payoff,lattice_sum,final_mu\n";
    for (std::size_t i = 0; i < report.per_rep.size(); ++i) {
      const auto& r = report.per_rep[i];
      f << i << ',' << fmt(r.payoff) << ',' << r.lattice_sum << ',' << fmt(r.final_mu) << '\n';
    }
  }
}

void cmd_posterior(const RunConfig& cfg, std::ostream& out) {
  const Environment env = load_env(cfg);
  const auto* two = std::get_if<TwoArmedEnv>(&env);
  if (!two) throw ValidationError("posterior needs a two_armed environment");
  const auto s = load_strategy(cfg, env);
  const auto report = posterior_consistency(*two, parse_truth(cfg.truth), s, cfg.n, cfg.reps,
                                            cfg.seed, cfg.threads);
  emit_json(to_json(report), out);
}

void cmd_converge(const RunConfig& cfg, std::ostream& out) {
  const Environment env = load_env(cfg);
  const auto u = load_utility(cfg, env);
  const auto params = ObmParams::make(env_sigma_low(env), env_sigma_high(env), u.c());
  const double v = value_by_quadrature(u, params).v;
  DpOptions options;
  options.state_cap = static_cast<std::size_t>(cfg.state_cap);

  std::vector<double> ns, gaps;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t n : parse_n_grid(cfg.n_grid)) {
    const double vn = value_n(env, u, n, options).value;
    ns.push_back(static_cast<double>(n));
    gaps.push_back(vn - v);
    rows.push_back({{"n", n}, {"V_n", vn}, {"V_n_minus_V", vn - v}, {"V", v}});
  }
  if (cfg.format == "csv") {
    out << "n,V_n,V_n_minus_V,V\n";
    for (const auto& r : rows) {
      out << r["n"].get<std::size_t>() << ',' << fmt(r["V_n"].get<double>()) << ','
          << fmt(r["V_n_minus_V"].get<double>()) << ',' << fmt(v) << '\n';
    }
    return;
  }
  nlohmann::json j{{"V", v}, {"rows", rows}};
  j["slope"] = ns.size() >= 2 ? nlohmann::json(loglog_slope(ns, gaps)) : nlohmann::json();
  emit_json(j, out);
}

void dispatch(const RunConfig& cfg, std::ostream& out) {
  const std::string& sub = cfg.subcommand;
  if (sub == "value") return cmd_value(cfg, out);
  if (sub == "density") return cmd_density(cfg, out);
  if (sub == "obm-sample") return cmd_obm_sample(cfg, out);
  if (sub == "dp") return cmd_dp(cfg, out);
  if (sub == "simulate") return cmd_simulate(cfg, out);
  if (sub == "posterior") return cmd_posterior(cfg, out);
  if (sub == "converge") return cmd_converge(cfg, out);
  throw ValidationError("unknown subcommand '" + sub + "'");
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
  sub->add_option("--output", cfg.output, "Write results to this file instead of stdout");
  sub->add_option("--format", cfg.format, "Result format")->check(CLI::IsMember({"json", "csv"}));
}

void add_obm(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--c", cfg.c, "Reference point / switching threshold");
  sub->add_option("--sigma-low", cfg.sigma_low, "Smallest arm standard deviation");
  sub->add_option("--sigma-high", cfg.sigma_high, "Largest arm standard deviation");
}

}  // namespace

std::vector<std::size_t> parse_n_grid(const std::string& text) {
  auto to_size = [&](const std::string& s) {
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v == 0) {
      throw ValidationError("bad --n-grid entry '" + s + "'");
    }
    return v;
  };
  std::vector<std::size_t> grid;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const std::size_t lo = to_size(text.substr(0, dots));
    const std::size_t hi = to_size(text.substr(dots + 2));
    if (lo > hi) throw ValidationError("--n-grid range must be increasing");
    for (std::size_t n = lo; n <= hi; n *= 2) grid.push_back(n);
    return grid;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) grid.push_back(to_size(item));
  if (grid.empty()) throw ValidationError("--n-grid is empty");
  return grid;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] == 0.0) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(std::fabs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) return std::nan("");
  const double dm = static_cast<double>(m);
  return (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate_config(cfg);
    if (cfg.output.empty()) {
      dispatch(cfg, out);
    } else {
      // Buffer so a failed run leaves no partial file behind.
      std::ostringstream buf;
      dispatch(cfg, buf);
      auto f = open_output(cfg.output);
      f << buf.str();
    }
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Loss-averse bandit values, oscillating Brownian motion densities, DP and MC"};
  app.name("labandit");
  app.require_subcommand(1);

  auto* value = app.add_subcommand("value", "Asymptotic value V of the bandit problem");
  add_obm(value, cfg);
  value->add_option("--phi1", cfg.phi1, "Gain-side index: exponential or a registered custom:<name>");
  value->add_option("--method", cfg.method, "Integration method")
      ->check(CLI::IsMember({"quadrature", "closed-form"}));
  add_common(value, cfg);

  double transition_s = 0.0;
  auto* density = app.add_subcommand("density", "Time-1 or transition density of the limit diffusion (CSV y,q)");
  add_obm(density, cfg);
  density->add_option("--y-min", cfg.y_min, "Left end of the y grid");
  density->add_option("--y-max", cfg.y_max, "Right end of the y grid");
  density->add_option("--points", cfg.points, "Number of grid points");
  density->add_option("--t", cfg.transition_t, "Start time of the transition density");
  density->add_option("--x", cfg.transition_x, "Start point of the transition density");
  auto* s_opt = density->add_option("--s", transition_s, "End time; selects q(t, x; s, y)");
  add_common(density, cfg);

  auto* sample = app.add_subcommand("obm-sample", "Euler-Maruyama path of the limit diffusion (CSV t,W_t)");
  add_obm(sample, cfg);
  sample->add_option("--start", cfg.start, "Initial value");
  sample->add_option("--t-end", cfg.t_end, "Final time");
  sample->add_option("--steps", cfg.steps, "Time steps");
  sample->add_option("--seed", cfg.seed, "Random seed");
  add_common(sample, cfg);

  double indicator_c = 0.0;
  auto* dp = app.add_subcommand("dp", "Exact finite-horizon value by backward induction");
  dp->add_option("--env", cfg.env, "Environment JSON (inline or file)");
  dp->add_option("--utility", cfg.utility, "Utility JSON (inline or file)");
  dp->add_option("--n", cfg.n, "Horizon");
  auto* ind_opt = dp->add_option("--indicator-c", indicator_c,
                                 "Compute sup_s P(S_n / sqrt(n) >= c) instead of the value");
  dp->add_option("--strategy", cfg.strategy,
                 "Evaluate a fixed strategy: s_star, s_star_horizon, s_star_learning, "
                 "single:<arm>, custom:<file>");
  dp->add_option("--horizon-c", cfg.horizon_c, "Threshold c of s_star_horizon");
  dp->add_option("--dump-table", cfg.dump_table, "Write the value table as CSV to this file");
  dp->add_option("--state-cap", cfg.state_cap, "Maximum number of resident DP states");
  dp->add_flag("!--no-timing", cfg.timing, "Omit runtime_ms for byte-identical output");
  add_common(dp, cfg);

  double sim_indicator_c = 0.0;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo under the law induced by a strategy");
  sim->add_option("--env", cfg.env, "Environment JSON (inline or file)");
  sim->add_option("--utility", cfg.utility,
                  "Utility JSON (default: exponential at --c, coupled to the env)");
  sim->add_option("--c", cfg.c, "Reference point of the default utility");
  sim->add_option("--strategy", cfg.strategy, "Strategy selector (default s_star / s_star_learning)");
  sim->add_option("--horizon-c", cfg.horizon_c, "Threshold c of s_star_horizon");
  sim->add_option("--n", cfg.n, "Horizon");
  sim->add_option("--reps", cfg.reps, "Replications");
  sim->add_option("--seed", cfg.seed, "Random seed");
  sim->add_option("--scaling", cfg.scaling, "Normalize the sum by sqrt(n) or n")
      ->check(CLI::IsMember({"sqrt", "linear"}));
  sim->add_option("--persistence-N", cfg.persistence_n, "Start of the sign-persistence window");
  auto* sim_ind_opt =
      sim->add_option("--indicator-c", sim_indicator_c, "Threshold of the indicator frequency");
  sim->add_option("--per-rep-csv", cfg.per_rep_csv, "Write per-replication results as CSV");
  add_common(sim, cfg);

  auto* post = app.add_subcommand("posterior", "Posterior consistency in the two-armed model");
  post->add_option("--env", cfg.env, "two_armed environment JSON (inline or file)");
  post->add_option("--truth", cfg.truth, "Outcome law: a_is_low, a_is_high or subjective")
      ->check(CLI::IsMember({"a_is_low", "a_is_high", "subjective"}));
  post->add_option("--strategy", cfg.strategy, "Strategy selector (default s_star_learning)");
  post->add_option("--n", cfg.n, "Stage at which mu_n is read");
  post->add_option("--reps", cfg.reps, "Replications");
  post->add_option("--seed", cfg.seed, "Random seed");
  add_common(post, cfg);

  auto* conv = app.add_subcommand("converge", "V_n over an n-grid against the limit V");
  conv->add_option("--env", cfg.env, "Environment JSON (inline or file)");
  conv->add_option("--utility", cfg.utility,
                   "Utility JSON (default: exponential at --c, coupled to the env)");
  conv->add_option("--c", cfg.c, "Reference point of the default utility");
  conv->add_option("--n-grid", cfg.n_grid, "a..b (doubling) or a comma list");
  conv->add_option("--state-cap", cfg.state_cap, "Maximum number of resident DP states");
  add_common(conv, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  cfg.subcommand = app.get_subcommands().front()->get_name();
  if (s_opt->count() > 0) cfg.transition_s = transition_s;
  if (ind_opt->count() > 0) cfg.indicator_c = indicator_c;
  if (sim_ind_opt->count() > 0) cfg.indicator_c = sim_indicator_c;

  if (const char* env_seed = std::getenv("BANDIT_SEED")) {
    const std::string text(env_seed);
    std::uint64_t seed = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
      err << "error: BANDIT_SEED must be an unsigned integer\n";
      return kExitValidation;
    }
    cfg.seed = seed;
  }
  return run(cfg, out, err);
}

}  // namespace labandit::cli
