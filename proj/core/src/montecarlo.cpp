#include "labandit/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "labandit/errors.hpp"
#include "labandit/parallel.hpp"
#include "labandit/rng.hpp"

namespace labandit {

namespace {

enum class PullClass : std::uint8_t { high, low, other };

struct RepOutcome {
  double payoff = 0.0;
  std::int64_t sum = 0;
  double final_mu = 0.0;
  std::int64_t pulls_high = 0;
  std::int64_t pulls_low = 0;
  std::int64_t pulls_other = 0;
  PullClass last = PullClass::other;
  bool nonpositive_throughout = true;
  bool positive_throughout = true;
  bool indicator = false;
};

/// Inverse-cdf draw from a finite pmf.
std::size_t draw_index(RandomStream& rs, const std::vector<double>& cumulative) {
  const double u = rs.uniform();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  const auto idx = static_cast<std::size_t>(it - cumulative.begin());
  return std::min(idx, cumulative.size() - 1);
}

int draw_trinomial(RandomStream& rs, const std::array<double, 2>& probs) {
  const double u = rs.uniform();
  if (u < probs[0]) return -1;
  if (u < probs[0] + probs[1]) return 0;
  return 1;
}

std::vector<std::vector<double>> cumulative_probs(const NoLearningEnv& env) {
  std::vector<std::vector<double>> out;
  for (const auto& arm : env.arms()) {
    std::vector<double> cdf;
    double acc = 0.0;
    for (double p : arm.probs) cdf.push_back(acc += p);
    out.push_back(std::move(cdf));
  }
  return out;
}

/// Class of each arm by second moment: exactly the largest, exactly the
/// smallest, or strictly between.
std::vector<PullClass> classify_arms(const NoLearningEnv& env) {
  const double hi = env.arms()[env.high_arm()].second_moment();
  const double lo = env.arms()[env.low_arm()].second_moment();
  std::vector<PullClass> out;
  for (const auto& arm : env.arms()) {
    const double m2 = arm.second_moment();
    out.push_back(m2 == hi ? PullClass::high : m2 == lo ? PullClass::low : PullClass::other);
  }
  return out;
}

void count_pull(RepOutcome& r, PullClass c) {
  switch (c) {
    case PullClass::high: ++r.pulls_high; break;
    case PullClass::low: ++r.pulls_low; break;
    case PullClass::other: ++r.pulls_other; break;
  }
  r.last = c;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : pairwise_sum(v.data(), v.size()) / static_cast<double>(v.size());
}

}  // namespace

std::string to_string(Scaling s) { return s == Scaling::sqrt ? "sqrt" : "linear"; }

Scaling parse_scaling(const std::string& text) {
  if (text == "sqrt") return Scaling::sqrt;
  if (text == "linear") return Scaling::linear;
  throw ValidationError("scaling must be sqrt or linear, got '" + text + "'");
}

SimReport simulate_paths(const Environment& env, const Strategy& s, const UtilityIndex& u,
                         std::size_t n, std::size_t reps, std::uint64_t seed,
                         const SimOptions& options, const Tolerances& tol) {
  validate_env(env, tol);
  if (n == 0) throw ValidationError("simulate: n must be at least 1");
  if (reps == 0) throw ValidationError("simulate: reps must be at least 1");
  const Policy policy(env, s, n, tol);

  const std::int64_t scale = lattice_scale(env);
  const auto n64 = static_cast<std::int64_t>(n);
  // S_n / sqrt(n) >= c, or S_n / n = S_n / sqrt(n^2) >= c.
  const ScaledThreshold indicator(options.indicator_c, scale,
                                  options.scaling == Scaling::sqrt ? n64 : n64 * n64);
  const double denom = static_cast<double>(scale) *
                       (options.scaling == Scaling::sqrt ? std::sqrt(static_cast<double>(n))
                                                         : static_cast<double>(n));
  const std::size_t window_from = std::min(std::max<std::size_t>(options.persistence_n, 1), n);

  const auto* no_learning = std::get_if<NoLearningEnv>(&env);
  const auto* two_armed = std::get_if<TwoArmedEnv>(&env);
  std::vector<std::vector<double>> cdfs;
  std::vector<PullClass> classes;
  if (no_learning) {
    cdfs = cumulative_probs(*no_learning);
    classes = classify_arms(*no_learning);
  }
  const double tie = tol.belief_tie;

  std::vector<RepOutcome> results(reps);
  parallel_for_chunks(reps, options.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t rep = begin; rep < end; ++rep) {
      RandomStream rs(seed, rep);
      RepOutcome r;
      History h;
      BeliefState belief;
      if (two_armed) belief = BeliefState::from_mu(two_armed->mu1());
      for (std::size_t k = 1; k <= n; ++k) {
        const ArmId arm = policy(h);
        std::int64_t outcome = 0;
        if (no_learning) {
          outcome = no_learning->steps(arm)[draw_index(rs, cdfs[arm])];
          count_pull(r, classes[arm]);
        } else {
          const double odds = two_armed->log_odds(h.d_nonzero, h.d_zero);
          const double mu = BeliefState{odds}.mu();
          // Arm a carries the larger conditional variance iff mu < 1/2.
          const bool a_high = odds < -tie;
          const bool a_low = odds > tie;
          const bool pulled_a = arm == TwoArmedEnv::kArmA;
          PullClass c = PullClass::other;
          if (a_high || a_low) c = (a_high == pulled_a) ? PullClass::high : PullClass::low;
          count_pull(r, c);
          if (k == n) r.final_mu = belief.mu();
          const int w = draw_trinomial(rs, two_armed_probs(*two_armed, mu, arm));
          belief = posterior_update(*two_armed, belief, arm, w);
          outcome = w;
        }
        h = advance(env, h, arm, outcome);
        if (k >= window_from) {
          if (h.sum > 0) r.nonpositive_throughout = false;
          if (h.sum <= 0) r.positive_throughout = false;
        }
      }
      r.sum = h.sum;
      r.payoff = u(static_cast<double>(h.sum) / denom);
      r.indicator = indicator.at_or_above(h.sum);
      results[rep] = r;
    }
  });

  SimReport report;
  report.reps = reps;
  report.n = n;
  report.seed = seed;
  report.scaling = options.scaling;
  report.strategy = s.selector(env);
  report.persistence_from = window_from;
  report.persistence_to = n;

  std::vector<double> payoffs(reps);
  for (std::size_t i = 0; i < reps; ++i) payoffs[i] = results[i].payoff;
  report.value_estimate = mean_of(payoffs);
  if (!std::isfinite(report.value_estimate)) {
    throw SelfCheckError("simulate: non-finite value estimate");
  }
  if (reps > 1) {
    std::vector<double> sq(reps);
    for (std::size_t i = 0; i < reps; ++i) {
      const double d = payoffs[i] - report.value_estimate;
      sq[i] = d * d;
    }
    const double var = pairwise_sum(sq.data(), reps) / static_cast<double>(reps - 1);
    report.std_error = std::sqrt(var / static_cast<double>(reps));
  }

  std::int64_t high = 0, low = 0, other = 0;
  std::int64_t last_high = 0, last_low = 0, last_other = 0;
  std::int64_t nonpos = 0, pos = 0, ind = 0;
  for (const auto& r : results) {
    high += r.pulls_high;
    low += r.pulls_low;
    other += r.pulls_other;
    last_high += r.last == PullClass::high;
    last_low += r.last == PullClass::low;
    last_other += r.last == PullClass::other;
    nonpos += r.nonpositive_throughout;
    pos += r.positive_throughout;
    ind += r.indicator;
  }
  const double total = static_cast<double>(high + low + other);
  report.pull_frequency = {static_cast<double>(high) / total, static_cast<double>(low) / total,
                           static_cast<double>(other) / total};
  const double dreps = static_cast<double>(reps);
  report.final_stage_pull_frequency = {static_cast<double>(last_high) / dreps,
                                       static_cast<double>(last_low) / dreps,
                                       static_cast<double>(last_other) / dreps};
  report.persistent_nonpositive = static_cast<double>(nonpos) / dreps;
  report.persistent_positive = static_cast<double>(pos) / dreps;
  report.indicator_frequency = static_cast<double>(ind) / dreps;

  if (two_armed) {
    std::vector<std::int64_t> bins(10, 0);
    std::int64_t certain = 0;
    for (const auto& r : results) {
      const auto b = std::min<std::size_t>(9, static_cast<std::size_t>(r.final_mu * 10.0));
      ++bins[b];
      certain += std::min(r.final_mu, 1.0 - r.final_mu) < 0.01;
    }
    for (auto b : bins) report.posterior_histogram.push_back(static_cast<double>(b) / dreps);
    report.posterior_certain_fraction = static_cast<double>(certain) / dreps;
  }

  if (options.keep_per_rep) {
    report.per_rep.reserve(reps);
    for (const auto& r : results) report.per_rep.push_back({r.payoff, r.sum, r.final_mu});
  }
  return report;
}

PosteriorTruth parse_truth(const std::string& text) {
  if (text == "a_is_low" || text == "a") return PosteriorTruth::a_is_low;
  if (text == "a_is_high" || text == "b") return PosteriorTruth::a_is_high;
  if (text == "subjective") return PosteriorTruth::subjective;
  throw ValidationError("truth must be a_is_low, a_is_high or subjective, got '" + text + "'");
}

std::string to_string(PosteriorTruth t) {
  switch (t) {
    case PosteriorTruth::a_is_low: return "a_is_low";
    case PosteriorTruth::a_is_high: return "a_is_high";
    case PosteriorTruth::subjective: return "subjective";
  }
  return "";
}

PosteriorReport posterior_consistency(const TwoArmedEnv& env, PosteriorTruth truth,
                                      const Strategy& s, std::size_t n, std::size_t reps,
                                      std::uint64_t seed, unsigned threads,
                                      const Tolerances& tol) {
  const Environment wrapped = env;
  validate_env(wrapped, tol);
  if (n == 0) throw ValidationError("posterior: n must be at least 1");
  if (reps == 0) throw ValidationError("posterior: reps must be at least 1");
  const Policy policy(wrapped, s, n, tol);

  PosteriorReport report;
  report.reps = reps;
  report.n = n;
  report.seed = seed;
  report.truth = truth;
  report.degenerate_prior_conflict = (truth == PosteriorTruth::a_is_low && env.mu1() == 0.0) ||
                                     (truth == PosteriorTruth::a_is_high && env.mu1() == 1.0);

  std::vector<double> final_mu(reps);
  parallel_for_chunks(reps, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t rep = begin; rep < end; ++rep) {
      RandomStream rs(seed, rep);
      History h;
      BeliefState belief = BeliefState::from_mu(env.mu1());
      // mu_n is the belief entering stage n: n - 1 observations.
      for (std::size_t k = 1; k < n; ++k) {
        const ArmId arm = policy(h);
        double law_mu = 0.0;
        switch (truth) {
          case PosteriorTruth::a_is_low: law_mu = 1.0; break;
          case PosteriorTruth::a_is_high: law_mu = 0.0; break;
          case PosteriorTruth::subjective:
            law_mu = BeliefState{env.log_odds(h.d_nonzero, h.d_zero)}.mu();
            break;
        }
        const int w = draw_trinomial(rs, two_armed_probs(env, law_mu, arm));
        belief = posterior_update(env, belief, arm, w);
        h = advance(wrapped, h, arm, w);
      }
      final_mu[rep] = belief.mu();
    }
  });

  const double dreps = static_cast<double>(reps);
  std::int64_t toward = 0, certain = 0;
  for (double mu : final_mu) {
    if (truth == PosteriorTruth::a_is_low) toward += mu > 0.99;
    if (truth == PosteriorTruth::a_is_high) toward += mu < 0.01;
    certain += std::min(mu, 1.0 - mu) < 0.01;
  }
  if (truth != PosteriorTruth::subjective) {
    report.fraction_toward_truth = static_cast<double>(toward) / dreps;
  }
  report.fraction_certain = static_cast<double>(certain) / dreps;
  report.mean_mu = mean_of(final_mu);
  return report;
}

nlohmann::json to_json(const SimReport& r) {
  auto freq = [](const PullFrequency& f) {
    return nlohmann::json{{"high", f.high}, {"low", f.low}, {"other", f.other}};
  };
  nlohmann::json j{
      {"reps", r.reps},
      {"n", r.n},
      {"seed", r.seed},
      {"scaling", to_string(r.scaling)},
      {"strategy", r.strategy},
      {"value_estimate", r.value_estimate},
      {"std_error", r.std_error},
      {"pull_frequency", freq(r.pull_frequency)},
      {"final_stage_pull_frequency", freq(r.final_stage_pull_frequency)},
      {"persistence",
       {{"window", {r.persistence_from, r.persistence_to}},
        {"nonpositive", r.persistent_nonpositive},
        {"positive", r.persistent_positive}}},
      {"indicator_frequency", r.indicator_frequency},
  };
  if (!r.posterior_histogram.empty()) {
    j["posterior_histogram"] = r.posterior_histogram;
    j["posterior_certain_fraction"] = *r.posterior_certain_fraction;
  }
  return j;
}

nlohmann::json to_json(const PosteriorReport& r) {
  nlohmann::json j{
      {"reps", r.reps},
      {"n", r.n},
      {"seed", r.seed},
      {"truth", to_string(r.truth)},
      {"fraction_certain", r.fraction_certain},
      {"mean_mu", r.mean_mu},
      {"degenerate_prior_conflict", r.degenerate_prior_conflict},
  };
  j["fraction_toward_truth"] =
      r.fraction_toward_truth ? nlohmann::json(*r.fraction_toward_truth) : nlohmann::json();
  return j;
}

}  // namespace labandit
