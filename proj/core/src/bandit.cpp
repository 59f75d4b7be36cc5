#include "labandit/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "labandit/errors.hpp"

namespace labandit {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double ArmSpec::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) m += support[i].value() * probs[i];
  return m;
}

double ArmSpec::second_moment() const {
  double m = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const double x = support[i].value();
    m += x * x * probs[i];
  }
  return m;
}

double ArmSpec::sd() const { return std::sqrt(second_moment()); }

NoLearningEnv NoLearningEnv::make(std::vector<ArmSpec> arms) {
  NoLearningEnv env;
  std::int64_t scale = 1;
  for (std::size_t a = 0; a < arms.size(); ++a) {
    auto& arm = arms[a];
    if (arm.id.empty()) arm.id = "arm" + std::to_string(a);
    if (arm.support.size() != arm.probs.size()) {
      throw ValidationError("arm '" + arm.id + "': support and probs differ in length");
    }
    if (arm.support.empty()) throw ValidationError("arm '" + arm.id + "' has empty support");
    for (const auto& x : arm.support) scale = std::lcm(scale, x.den);
  }
  for (std::size_t a = 0; a < arms.size(); ++a) {
    for (std::size_t b = 0; b < a; ++b) {
      if (arms[a].id == arms[b].id) throw ValidationError("duplicate arm id '" + arms[a].id + "'");
    }
  }
  env.scale_ = scale;
  env.steps_.reserve(arms.size());
  for (const auto& arm : arms) {
    std::vector<std::int64_t> steps;
    for (const auto& x : arm.support) {
      const std::int64_t step = x.num * (scale / x.den);
      env.max_abs_step_ = std::max(env.max_abs_step_, std::abs(step));
      steps.push_back(step);
    }
    env.steps_.push_back(std::move(steps));
  }
  env.arms_ = std::move(arms);
  for (ArmId a = 0; a < env.arms_.size(); ++a) {
    if (env.arms_[a].second_moment() > env.arms_[env.high_arm_].second_moment()) env.high_arm_ = a;
    if (env.arms_[a].second_moment() < env.arms_[env.low_arm_].second_moment()) env.low_arm_ = a;
  }
  return env;
}

TwoArmedEnv TwoArmedEnv::make(double p_low, double p_high, double mu1) {
  TwoArmedEnv env;
  env.p_low_ = p_low;
  env.p_high_ = p_high;
  env.mu1_ = mu1;
  env.log_ratio_nonzero_ = std::log(p_low / p_high);
  env.log_ratio_zero_ = std::log((1.0 - p_low) / (1.0 - p_high));
  return env;
}

double TwoArmedEnv::sigma_low() const { return std::sqrt(p_low_); }
double TwoArmedEnv::sigma_high() const { return std::sqrt(p_high_); }

double TwoArmedEnv::log_odds(std::int64_t d_nonzero, std::int64_t d_zero) const {
  const double prior = BeliefState::from_mu(mu1_).log_odds;
  if (std::isinf(prior)) return prior;
  return prior + static_cast<double>(d_nonzero) * log_ratio_nonzero_ +
         static_cast<double>(d_zero) * log_ratio_zero_;
}

std::size_t arm_count(const Environment& env) {
  return std::visit(Overloaded{[](const NoLearningEnv& e) { return e.arm_count(); },
                               [](const TwoArmedEnv&) { return std::size_t{2}; }},
                    env);
}

std::string arm_name(const Environment& env, ArmId arm) {
  return std::visit(
      Overloaded{[&](const NoLearningEnv& e) { return e.arms().at(arm).id; },
                 [&](const TwoArmedEnv&) { return std::string(arm == TwoArmedEnv::kArmA ? "a" : "b"); }},
      env);
}

ArmId find_arm(const Environment& env, const std::string& name) {
  const auto count = arm_count(env);
  for (ArmId a = 0; a < count; ++a) {
    if (arm_name(env, a) == name) return a;
  }
  if (!name.empty() && std::all_of(name.begin(), name.end(), ::isdigit)) {
    const auto index = static_cast<ArmId>(std::stoull(name));
    if (index < count) return index;
  }
  throw ValidationError("unknown arm '" + name + "'");
}

std::int64_t lattice_scale(const Environment& env) {
  return std::visit(Overloaded{[](const NoLearningEnv& e) { return e.scale(); },
                               [](const TwoArmedEnv&) { return std::int64_t{1}; }},
                    env);
}

double env_sigma_low(const Environment& env) {
  return std::visit([](const auto& e) { return e.sigma_low(); }, env);
}

double env_sigma_high(const Environment& env) {
  return std::visit([](const auto& e) { return e.sigma_high(); }, env);
}

ValidationReport validate_env(const Environment& env, const Tolerances& tol) {
  ValidationReport report;
  std::visit(
      Overloaded{
          [&](const NoLearningEnv& e) {
            if (e.arm_count() == 0) throw ValidationError("environment has no arms");
            for (const auto& arm : e.arms()) {
              double total = 0.0;
              for (double p : arm.probs) {
                if (!(p > 0.0)) {
                  throw ValidationError("arm '" + arm.id +
                                        "' has a zero-probability outcome; full support required");
                }
                total += p;
              }
              if (std::abs(total - 1.0) > tol.exact) {
                std::ostringstream msg;
                msg << "arm '" << arm.id << "' probabilities sum to " << total;
                throw ValidationError(msg.str());
              }
              if (std::abs(arm.mean()) > tol.exact) {
                std::ostringstream msg;
                msg << "arm '" << arm.id << "' has mean " << arm.mean() << " != 0";
                throw ValidationError(msg.str());
              }
              for (std::size_t i = 0; i < arm.support.size(); ++i) {
                for (std::size_t j = 0; j < i; ++j) {
                  if (arm.support[i] == arm.support[j]) {
                    throw ValidationError("arm '" + arm.id + "' lists an outcome twice");
                  }
                }
              }
            }
            report.sigma_low = e.sigma_low();
            report.sigma_high = e.sigma_high();
          },
          [&](const TwoArmedEnv& e) {
            if (!(e.p_low() > 0.0 && e.p_low() < e.p_high() && e.p_high() < 1.0)) {
              std::ostringstream msg;
              msg << "need 0 < p_low < p_high < 1, got (" << e.p_low() << ", " << e.p_high() << ")";
              throw ValidationError(msg.str());
            }
            if (!(e.mu1() >= 0.0 && e.mu1() <= 1.0)) {
              throw ValidationError("mu1 must lie in [0, 1]");
            }
            report.sigma_low = e.sigma_low();
            report.sigma_high = e.sigma_high();
          }},
      env);
  report.trivial = report.sigma_low == report.sigma_high;
  if (report.trivial) {
    report.warnings.push_back(
        "sigma_low == sigma_high: trivial case, every arm is asymptotically equivalent");
  }
  return report;
}

double BeliefState::mu() const {
  if (log_odds == kInf) return 1.0;
  if (log_odds == -kInf) return 0.0;
  return 1.0 / (1.0 + std::exp(-log_odds));
}

BeliefState BeliefState::from_mu(double mu) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw ValidationError("belief must lie in [0, 1]");
  if (mu == 1.0) return {kInf};
  if (mu == 0.0) return {-kInf};
  return {std::log(mu / (1.0 - mu))};
}

BeliefState posterior_update(const TwoArmedEnv& env, BeliefState belief, ArmId arm,
                             int outcome) {
  if (outcome < -1 || outcome > 1) throw ValidationError("two-armed outcomes are -1, 0, 1");
  if (arm > TwoArmedEnv::kArmB) throw ValidationError("two-armed env has arms a and b only");
  if (std::isinf(belief.log_odds)) return belief;
  const double step = outcome == 0 ? env.log_ratio_zero() : env.log_ratio_nonzero();
  belief.log_odds += arm == TwoArmedEnv::kArmA ? step : -step;
  return belief;
}

BeliefState belief_at(const TwoArmedEnv& env, const History& h) {
  return {env.log_odds(h.d_nonzero, h.d_zero)};
}

History advance(const Environment& env, const History& h, ArmId arm, std::int64_t outcome) {
  History next = h;
  ++next.stage;
  next.sum += outcome;
  if (std::holds_alternative<TwoArmedEnv>(env)) {
    const std::int64_t sign = arm == TwoArmedEnv::kArmA ? 1 : -1;
    if (outcome == 0) {
      next.d_zero += sign;
    } else {
      next.d_nonzero += sign;
    }
  }
  return next;
}

std::array<double, 2> two_armed_probs(const TwoArmedEnv& env, double mu, ArmId arm) {
  // Weight on the p_low scenario for this arm.
  const double w = arm == TwoArmedEnv::kArmA ? mu : 1.0 - mu;
  const double half_nonzero = 0.5 * (w * env.p_low() + (1.0 - w) * env.p_high());
  const double zero = w * (1.0 - env.p_low()) + (1.0 - w) * (1.0 - env.p_high());
  return {half_nonzero, zero};
}

std::vector<Pmf> one_step_conditional(const Environment& env, const History& h) {
  return std::visit(
      Overloaded{[&](const NoLearningEnv& e) {
                   std::vector<Pmf> out;
                   for (ArmId a = 0; a < e.arm_count(); ++a) {
                     out.push_back(Pmf{e.steps(a), e.arms()[a].probs});
                   }
                   return out;
                 },
                 [&](const TwoArmedEnv& e) {
                   const double mu = belief_at(e, h).mu();
                   std::vector<Pmf> out;
                   for (ArmId a : {TwoArmedEnv::kArmA, TwoArmedEnv::kArmB}) {
                     const auto [half, zero] = two_armed_probs(e, mu, a);
                     out.push_back(Pmf{{-1, 0, 1}, {half, zero, half}});
                   }
                   return out;
                 }},
      env);
}

Strategy Strategy::s_star_no_learn() { return Strategy{}; }

Strategy Strategy::s_star_horizon(double c) {
  Strategy s;
  s.kind_ = Kind::s_star_horizon;
  s.c_ = c;
  return s;
}

Strategy Strategy::s_star_learning() {
  Strategy s;
  s.kind_ = Kind::s_star_learning;
  return s;
}

Strategy Strategy::single_arm(ArmId arm) {
  Strategy s;
  s.kind_ = Kind::single_arm;
  s.arm_ = arm;
  return s;
}

Strategy Strategy::custom(CustomTable table) {
  Strategy s;
  s.kind_ = Kind::custom;
  s.table_ = std::make_shared<const CustomTable>(std::move(table));
  return s;
}

std::string Strategy::selector(const Environment& env) const {
  switch (kind_) {
    case Kind::s_star_no_learn: return "s_star";
    case Kind::s_star_horizon: return "s_star_horizon";
    case Kind::s_star_learning: return "s_star_learning";
    case Kind::single_arm: return "single:" + arm_name(env, arm_);
    case Kind::custom: return "custom:" + table_->name;
  }
  return "unknown";
}

CustomTable custom_table_from_json(const nlohmann::json& j, const Environment& env) {
  if (!j.is_object() || !j.contains("rules") || !j.at("rules").is_array()) {
    throw ValidationError("custom strategy must be an object with a 'rules' array");
  }
  CustomTable table;
  if (j.contains("default") && !j.at("default").is_null()) {
    table.default_arm = find_arm(env, j.at("default").get<std::string>());
  }
  for (const auto& rule : j.at("rules")) {
    try {
      const CustomTable::Key key{rule.at("stage").get<std::size_t>(),
                                 rule.value("lattice_sum", std::int64_t{0}),
                                 rule.value("d_nonzero", std::int64_t{0}),
                                 rule.value("d_zero", std::int64_t{0})};
      table.rules[key] = find_arm(env, rule.at("arm").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("malformed custom strategy rule: ") + e.what());
    }
  }
  return table;
}

Strategy parse_strategy(const std::string& selector, const Environment& env, double c) {
  if (selector == "s_star") return Strategy::s_star_no_learn();
  if (selector == "s_star_horizon") return Strategy::s_star_horizon(c);
  if (selector == "s_star_learning") return Strategy::s_star_learning();
  if (selector.starts_with("single:")) return Strategy::single_arm(find_arm(env, selector.substr(7)));
  if (selector.starts_with("custom:")) {
    const auto path = selector.substr(7);
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open custom strategy file '" + path + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("custom strategy file '" + path + "': " + e.what());
    }
    auto table = custom_table_from_json(j, env);
    table.name = path;
    return Strategy::custom(std::move(table));
  }
  throw ValidationError("unknown strategy selector '" + selector + "'");
}

Policy::Policy(const Environment& env, Strategy strategy, std::size_t horizon,
               const Tolerances& tol)
    : env_(&env), strategy_(std::move(strategy)), horizon_(horizon), tie_(tol.belief_tie) {
  const bool learning = std::holds_alternative<TwoArmedEnv>(env);
  switch (strategy_.kind()) {
    case Strategy::Kind::s_star_no_learn:
      if (learning) throw ValidationError("s_star needs a no-learning environment; use s_star_learning");
      break;
    case Strategy::Kind::s_star_horizon:
      if (learning) throw ValidationError("s_star_horizon needs a no-learning environment");
      if (horizon == 0) throw ValidationError("s_star_horizon needs a positive horizon");
      threshold_.emplace(strategy_.c(), lattice_scale(env), static_cast<std::int64_t>(horizon));
      break;
    case Strategy::Kind::s_star_learning:
      if (!learning) throw ValidationError("s_star_learning needs the two-armed environment");
      break;
    case Strategy::Kind::single_arm:
      if (strategy_.arm() >= arm_count(env)) throw ValidationError("single-arm strategy: no such arm");
      break;
    case Strategy::Kind::custom:
      break;
  }
}

ArmId Policy::operator()(const History& h) const {
  switch (strategy_.kind()) {
    case Strategy::Kind::s_star_no_learn: {
      const auto& e = std::get<NoLearningEnv>(*env_);
      return h.sum <= 0 ? e.high_arm() : e.low_arm();
    }
    case Strategy::Kind::s_star_horizon: {
      const auto& e = std::get<NoLearningEnv>(*env_);
      return threshold_->at_or_below(h.sum) ? e.high_arm() : e.low_arm();
    }
    case Strategy::Kind::s_star_learning: {
      if (h.stage <= 1) return TwoArmedEnv::kArmA;
      const double odds = std::get<TwoArmedEnv>(*env_).log_odds(h.d_nonzero, h.d_zero);
      const bool a_more_likely_low = odds > tie_;    // mu > 1/2
      const bool a_more_likely_high = odds < -tie_;  // mu < 1/2
      if ((h.sum <= 0 && a_more_likely_high) || (h.sum > 0 && a_more_likely_low)) {
        return TwoArmedEnv::kArmA;
      }
      return TwoArmedEnv::kArmB;
    }
    case Strategy::Kind::single_arm:
      return strategy_.arm();
    case Strategy::Kind::custom: {
      const auto* table = strategy_.table();
      const auto it = table->rules.find({h.stage, h.sum, h.d_nonzero, h.d_zero});
      if (it != table->rules.end()) return it->second;
      if (table->default_arm) return *table->default_arm;
      std::ostringstream msg;
      msg << "custom strategy undefined at stage " << h.stage << ", lattice sum " << h.sum
          << ", d_nonzero " << h.d_nonzero << ", d_zero " << h.d_zero;
      throw ValidationError(msg.str());
    }
  }
  return 0;
}

ArmId strategy_decide(const Environment& env, const Strategy& s, const History& h,
                      std::size_t horizon, const Tolerances& tol) {
  return Policy(env, s, horizon, tol)(h);
}

FrequencyVector frequency_vector(const TwoArmedEnv& env, const Strategy& s,
                                 const std::vector<int>& outcomes) {
  const Environment wrapped = env;
  const Policy policy(wrapped, s, outcomes.size());
  FrequencyVector f;
  History h;
  for (int w : outcomes) {
    if (w < -1 || w > 1) throw ValidationError("two-armed outcomes are -1, 0, 1");
    const ArmId arm = policy(h);
    if (arm == TwoArmedEnv::kArmA) {
      ++f.pulls_a;
      f.zeros_a += w == 0;
    } else {
      ++f.pulls_b;
      f.zeros_b += w == 0;
    }
    h = advance(wrapped, h, arm, w);
  }
  return f;
}

double path_probability(const TwoArmedEnv& env, const Strategy& s,
                        const std::vector<int>& outcomes) {
  const auto f = frequency_vector(env, s, outcomes);
  const double lo = env.p_low();
  const double hi = env.p_high();
  const auto nonzero_a = static_cast<double>(f.pulls_a - f.zeros_a);
  const auto nonzero_b = static_cast<double>(f.pulls_b - f.zeros_b);
  const auto zeros_a = static_cast<double>(f.zeros_a);
  const auto zeros_b = static_cast<double>(f.zeros_b);
  const double a_is_low = std::pow(lo / 2, nonzero_a) * std::pow(hi / 2, nonzero_b) *
                          std::pow(1 - lo, zeros_a) * std::pow(1 - hi, zeros_b);
  const double a_is_high = std::pow(hi / 2, nonzero_a) * std::pow(lo / 2, nonzero_b) *
                           std::pow(1 - hi, zeros_a) * std::pow(1 - lo, zeros_b);
  return env.mu1() * a_is_low + (1.0 - env.mu1()) * a_is_high;
}

Environment env_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw ValidationError("environment config needs a string 'type'");
  }
  const auto type = j.at("type").get<std::string>();
  try {
    if (type == "no_learning") {
      std::vector<ArmSpec> arms;
      for (const auto& a : j.at("arms")) {
        ArmSpec arm;
        if (a.contains("id")) arm.id = a.at("id").get<std::string>();
        for (const auto& x : a.at("support")) arm.support.push_back(rational_from_json(x));
        arm.probs = a.at("probs").get<std::vector<double>>();
        arms.push_back(std::move(arm));
      }
      return NoLearningEnv::make(std::move(arms));
    }
    if (type == "two_armed") {
      return TwoArmedEnv::make(j.at("p_low").get<double>(), j.at("p_high").get<double>(),
                               j.at("mu1").get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed environment config: ") + e.what());
  }
  throw ValidationError("unknown environment type '" + type + "'");
}

nlohmann::json to_json(const Environment& env) {
  return std::visit(
      Overloaded{[](const NoLearningEnv& e) {
                   nlohmann::json arms = nlohmann::json::array();
                   for (const auto& arm : e.arms()) {
                     nlohmann::json support = nlohmann::json::array();
                     for (const auto& x : arm.support) support.push_back(to_json(x));
                     arms.push_back({{"id", arm.id}, {"support", support}, {"probs", arm.probs}});
                   }
                   return nlohmann::json{{"type", "no_learning"}, {"arms", arms}};
                 },
                 [](const TwoArmedEnv& e) {
                   return nlohmann::json{{"type", "two_armed"},
                                         {"p_low", e.p_low()},
                                         {"p_high", e.p_high()},
                                         {"mu1", e.mu1()}};
                 }},
      env);
}

nlohmann::json to_json(const ValidationReport& r) {
  return {{"sigma_low", r.sigma_low},
          {"sigma_high", r.sigma_high},
          {"trivial", r.trivial},
          {"warnings", r.warnings}};
}

}  // namespace labandit
