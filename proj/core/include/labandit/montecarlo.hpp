#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "labandit/bandit.hpp"
#include "labandit/config.hpp"
#include "labandit/utility.hpp"

namespace labandit {

/// How the terminal sum is normalized before applying phi.
enum class Scaling { sqrt, linear };

std::string to_string(Scaling s);
Scaling parse_scaling(const std::string& text);

struct SimOptions {
  Scaling scaling = Scaling::sqrt;
  /// Start of the sign-persistence window [N, n].
  std::size_t persistence_n = 10;
  /// Threshold of the indicator event.
  double indicator_c = 0.0;
  unsigned threads = 0;
  /// Keep per-replication payoffs and terminal sums in the report.
  bool keep_per_rep = false;
};

/// Pull counts by the variance class of the pulled arm.
struct PullFrequency {
  double high = 0.0;
  double low = 0.0;
  double other = 0.0;
};

struct PerRep {
  double payoff = 0.0;
  std::int64_t lattice_sum = 0;
  double final_mu = 0.0;
};

struct SimReport {
  std::size_t reps = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  Scaling scaling = Scaling::sqrt;
  std::string strategy;

  double value_estimate = 0.0;
  double std_error = 0.0;

  /// Over all pulls at all stages.
  PullFrequency pull_frequency;
  /// Over the pulls made at stage n only.
  PullFrequency final_stage_pull_frequency;

  /// Window [persistence_n, n] over which the sign events are checked.
  std::size_t persistence_from = 0;
  std::size_t persistence_to = 0;
  /// Fraction of paths with S_k <= 0 for every k in the window.
  double persistent_nonpositive = 0.0;
  /// Fraction of paths with S_k > 0 for every k in the window.
  double persistent_positive = 0.0;

  /// Fraction with S_n / sqrt(n) >= c (sqrt scaling) or S_n / n >= c (linear).
  double indicator_frequency = 0.0;

  /// Two-armed env: histogram of mu_n (the belief entering stage n) over ten equal bins of
  /// [0, 1], and the fraction within 0.01 of certainty.
  std::vector<double> posterior_histogram;
  std::optional<double> posterior_certain_fraction;

  std::vector<PerRep> per_rep;
};

/// Simulates reps independent paths under P^s; replication r draws from
/// stream (seed, r), and aggregates are reduced in a fixed order, so the
/// report is bit-identical for identical inputs whatever the thread count.
SimReport simulate_paths(const Environment& env, const Strategy& s, const UtilityIndex& u,
                         std::size_t n, std::size_t reps, std::uint64_t seed,
                         const SimOptions& options = {}, const Tolerances& tol = kTolerances);

/// Which law generates the outcomes in posterior_consistency.
enum class PosteriorTruth {
  /// Arm a really is the p_low arm (Q^s).
  a_is_low,
  /// Arm a really is the p_high arm.
  a_is_high,
  /// Outcomes drawn from the subjective mixture P^s.
  subjective,
};

PosteriorTruth parse_truth(const std::string& text);
std::string to_string(PosteriorTruth t);

struct PosteriorReport {
  std::size_t reps = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  PosteriorTruth truth = PosteriorTruth::a_is_low;
  /// Fraction of paths whose mu_n passed 0.99 (a_is_low) or fell below 0.01
  /// (a_is_high); absent for the subjective law.
  std::optional<double> fraction_toward_truth;
  /// Fraction with min(mu_n, 1 - mu_n) < 0.01.
  double fraction_certain = 0.0;
  double mean_mu = 0.0;
  /// mu1 is 0 or 1 and contradicts the truth: beliefs can never move.
  bool degenerate_prior_conflict = false;
};

/// Posterior after n stages, tracked by posterior_update along each path.
PosteriorReport posterior_consistency(const TwoArmedEnv& env, PosteriorTruth truth,
                                      const Strategy& s, std::size_t n, std::size_t reps,
                                      std::uint64_t seed, unsigned threads = 0,
                                      const Tolerances& tol = kTolerances);

nlohmann::json to_json(const SimReport& r);
nlohmann::json to_json(const PosteriorReport& r);

}  // namespace labandit
