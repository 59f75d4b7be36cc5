#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "labandit/config.hpp"
#include "labandit/lattice.hpp"

namespace labandit {

using ArmId = std::size_t;

/// One arm of a no-learning menu: a fixed zero-mean pmf on rational outcomes.
struct ArmSpec {
  std::string id;
  std::vector<Rational> support;
  std::vector<double> probs;

  double mean() const;
  double second_moment() const;
  double sd() const;
};

/// Outcomes live on the integer grid support * scale.
class NoLearningEnv {
 public:
  /// Structural construction: ids default to "arm0", "arm1", ...; the lattice
  /// scale is the lcm of all outcome denominators. Zero-mean and support
  /// conditions are checked by validate_env.
  static NoLearningEnv make(std::vector<ArmSpec> arms);

  const std::vector<ArmSpec>& arms() const { return arms_; }
  std::size_t arm_count() const { return arms_.size(); }
  std::int64_t scale() const { return scale_; }
  /// Outcomes of arm `a` in lattice units, parallel to arms()[a].probs.
  const std::vector<std::int64_t>& steps(ArmId a) const { return steps_[a]; }
  std::int64_t max_abs_step() const { return max_abs_step_; }

  double sigma_low() const { return arms_[low_arm_].sd(); }
  double sigma_high() const { return arms_[high_arm_].sd(); }
  /// First arm (by index) attaining the largest / smallest standard deviation.
  ArmId high_arm() const { return high_arm_; }
  ArmId low_arm() const { return low_arm_; }

 private:
  std::vector<ArmSpec> arms_;
  std::vector<std::vector<std::int64_t>> steps_;
  std::int64_t scale_ = 1;
  std::int64_t max_abs_step_ = 0;
  ArmId high_arm_ = 0;
  ArmId low_arm_ = 0;
};

/// Two arms "a" and "b" on outcomes {-1, 0, 1}; one has P(+-1) = p_low / 2
/// each, the other p_high / 2, and mu1 is the prior that arm a is the
/// p_low arm.
class TwoArmedEnv {
 public:
  static constexpr ArmId kArmA = 0;
  static constexpr ArmId kArmB = 1;

  static TwoArmedEnv make(double p_low, double p_high, double mu1);

  double p_low() const { return p_low_; }
  double p_high() const { return p_high_; }
  double mu1() const { return mu1_; }
  double sigma_low() const;
  double sigma_high() const;

  /// Log posterior odds that arm a is the p_low arm after observing count
  /// differences d_nonzero (nonzero outcomes, a minus b) and d_zero (zero
  /// outcomes, a minus b).
  double log_odds(std::int64_t d_nonzero, std::int64_t d_zero) const;
  double log_ratio_nonzero() const { return log_ratio_nonzero_; }
  double log_ratio_zero() const { return log_ratio_zero_; }

 private:
  double p_low_ = 0.0;
  double p_high_ = 0.0;
  double mu1_ = 0.0;
  double log_ratio_nonzero_ = 0.0;  // log(p_low / p_high)
  double log_ratio_zero_ = 0.0;     // log((1 - p_low) / (1 - p_high))
};

using Environment = std::variant<NoLearningEnv, TwoArmedEnv>;

std::size_t arm_count(const Environment& env);
std::string arm_name(const Environment& env, ArmId arm);
/// Resolves an arm by id ("a", "b", "arm1", ...) or by decimal index.
ArmId find_arm(const Environment& env, const std::string& name);
std::int64_t lattice_scale(const Environment& env);
double env_sigma_low(const Environment& env);
double env_sigma_high(const Environment& env);

struct ValidationReport {
  double sigma_low = 0.0;
  double sigma_high = 0.0;
  /// sigma_low == sigma_high: every arm is asymptotically equivalent.
  bool trivial = false;
  std::vector<std::string> warnings;
};

/// Throws ValidationError on an empty menu, nonzero means, zero-probability
/// outcomes, probabilities not summing to one, or p outside 0 < p_low <
/// p_high < 1, mu1 outside [0, 1].
ValidationReport validate_env(const Environment& env, const Tolerances& tol = kTolerances);

/// Belief that arm a is the p_low arm, stored as log-odds; +-inf are the
/// absorbing certainties mu = 1 and mu = 0.
struct BeliefState {
  double log_odds = 0.0;

  double mu() const;
  static BeliefState from_mu(double mu);
};

/// One Bayesian step. `outcome` must be -1, 0 or 1; only whether it is zero
/// matters.
BeliefState posterior_update(const TwoArmedEnv& env, BeliefState belief, ArmId arm,
                             int outcome);

/// Decision-relevant summary of a history. Strategies and beliefs depend on
/// the past only through these fields; the action sequence is replayable
/// from outcomes given the strategy.
struct History {
  /// Stage about to be played (1-based); stage - 1 outcomes observed.
  std::size_t stage = 1;
  /// Cumulative outcome in lattice units.
  std::int64_t sum = 0;
  /// (f_a - f_a0) - (f_b - f_b0); two-armed env only.
  std::int64_t d_nonzero = 0;
  /// f_a0 - f_b0; two-armed env only.
  std::int64_t d_zero = 0;

  friend bool operator==(const History&, const History&) = default;
};

/// (f_a, f_b, f_a0, f_b0): pulls of each arm and how many returned 0.
struct FrequencyVector {
  std::int64_t pulls_a = 0;
  std::int64_t pulls_b = 0;
  std::int64_t zeros_a = 0;
  std::int64_t zeros_b = 0;
};

BeliefState belief_at(const TwoArmedEnv& env, const History& h);

/// Next history after pulling `arm` and observing `outcome` (lattice units).
History advance(const Environment& env, const History& h, ArmId arm, std::int64_t outcome);

/// Outcome pmf of one arm; outcomes in lattice units.
struct Pmf {
  std::vector<std::int64_t> outcomes;
  std::vector<double> probs;
};

/// The one-step-ahead law of each arm at history h (index = ArmId).
std::vector<Pmf> one_step_conditional(const Environment& env, const History& h);

/// P(+-1) (each) and P(0) of `arm` when the belief is mu.
std::array<double, 2> two_armed_probs(const TwoArmedEnv& env, double mu, ArmId arm);

/// Lookup table strategy keyed by (stage, lattice sum, d_nonzero, d_zero).
struct CustomTable {
  using Key = std::tuple<std::size_t, std::int64_t, std::int64_t, std::int64_t>;
  std::map<Key, ArmId> rules;
  std::optional<ArmId> default_arm;
  std::string name = "custom";
};

class Strategy {
 public:
  enum class Kind { s_star_no_learn, s_star_horizon, s_star_learning, single_arm, custom };

  /// High-variance arm iff the cumulative sum is <= 0; stage 1 plays it too.
  static Strategy s_star_no_learn();
  /// High-variance arm iff sum / sqrt(n) <= c, for horizon n.
  static Strategy s_star_horizon(double c);
  /// Arm a iff (sum <= 0 and mu < 1/2) or (sum > 0 and mu > 1/2); b otherwise.
  static Strategy s_star_learning();
  static Strategy single_arm(ArmId arm);
  static Strategy custom(CustomTable table);

  Kind kind() const { return kind_; }
  ArmId arm() const { return arm_; }
  double c() const { return c_; }
  const CustomTable* table() const { return table_.get(); }
  std::string selector(const Environment& env) const;

 private:
  Kind kind_ = Kind::s_star_no_learn;
  ArmId arm_ = 0;
  double c_ = 0.0;
  std::shared_ptr<const CustomTable> table_;
};

/// Parses "s_star", "s_star_horizon", "s_star_learning", "single:<arm>" or
/// "custom:<file>". `c` feeds s_star_horizon.
Strategy parse_strategy(const std::string& selector, const Environment& env, double c = 0.0);
CustomTable custom_table_from_json(const nlohmann::json& j, const Environment& env);

/// A strategy bound to an environment and horizon, with thresholds
/// precomputed. Keeps a pointer to `env`, which must outlive the policy.
/// Throws ValidationError when the strategy cannot act in this environment
/// (e.g. s_star on the two-armed env).
class Policy {
 public:
  Policy(const Environment& env, Strategy strategy, std::size_t horizon,
         const Tolerances& tol = kTolerances);

  /// Throws ValidationError if a custom table has no entry for h.
  ArmId operator()(const History& h) const;

 private:
  const Environment* env_;
  Strategy strategy_;
  std::size_t horizon_;
  double tie_;
  std::optional<ScaledThreshold> threshold_;
};

ArmId strategy_decide(const Environment& env, const Strategy& s, const History& h,
                      std::size_t horizon, const Tolerances& tol = kTolerances);

/// Frequency vector induced by replaying s along `outcomes` (values in
/// {-1, 0, 1}).
FrequencyVector frequency_vector(const TwoArmedEnv& env, const Strategy& s,
                                 const std::vector<int>& outcomes);

/// Joint probability of the outcome path under P^s, from the two-scenario
/// mixture over which arm is the p_low arm.
double path_probability(const TwoArmedEnv& env, const Strategy& s,
                        const std::vector<int>& outcomes);

Environment env_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Environment& env);
nlohmann::json to_json(const ValidationReport& r);

}  // namespace labandit
