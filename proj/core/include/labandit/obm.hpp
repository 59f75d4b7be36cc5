#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

namespace labandit {

/// Oscillating Brownian motion dY = sigma(Y) dB with
///   sigma(y) = sigma_low  for y >= c,
///   sigma(y) = sigma_high for y <  c.
class ObmParams {
 public:
  /// Throws ValidationError unless 0 < sigma_low <= sigma_high and c is finite.
  static ObmParams make(double sigma_low, double sigma_high, double c);

  double sigma_low() const { return sigma_low_; }
  double sigma_high() const { return sigma_high_; }
  double c() const { return c_; }
  double theta() const { return sigma_low_ / sigma_high_; }

  /// Diffusion coefficient; y == c belongs to the low-variance side.
  double sigma(double y) const { return y >= c_ ? sigma_low_ : sigma_high_; }

 private:
  ObmParams(double lo, double hi, double c) : sigma_low_(lo), sigma_high_(hi), c_(c) {}

  double sigma_low_;
  double sigma_high_;
  double c_;
};

struct ObmPath {
  std::vector<double> times;
  std::vector<double> values;
  std::uint64_t seed = 0;
};

/// Standard normal cdf.
double normal_cdf(double x);

/// Density of W_1 started at 0, evaluated branch by branch
/// for c >= 0 and c < 0.
double time1_pdf(const ObmParams& params, double y);

/// Transition density q^c(t, x; s, y) of the process started at x at time t.
/// Throws ValidationError if s <= t.
double transition_density(const ObmParams& params, double t, double x, double s, double y);

/// P(W_1 >= c) for W started at 0.
double indicator_prob(const ObmParams& params);

/// Euler-Maruyama path on a uniform grid with left-point coefficient, drawn
/// from stream (seed, 0).
ObmPath sample_path(const ObmParams& params, double start, double t_end, int n_steps,
                    std::uint64_t seed);

/// Endpoints of `reps` independent Euler-Maruyama paths; replication r uses
/// stream (seed, r), so endpoint 0 equals sample_path(...).values.back().
std::vector<double> sample_endpoints(const ObmParams& params, double start, double t_end,
                                     int n_steps, std::size_t reps, std::uint64_t seed,
                                     unsigned threads = 0);

nlohmann::json to_json(const ObmParams& params);

}  // namespace labandit
