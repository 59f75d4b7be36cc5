#include "labandit/obm.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "labandit/errors.hpp"
#include "labandit/parallel.hpp"
#include "labandit/rng.hpp"

namespace labandit {

namespace {

inline double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

inline double reflection_weight(const ObmParams& p) {
  return (p.sigma_high() - p.sigma_low()) / (p.sigma_high() + p.sigma_low());
}

}  // namespace

ObmParams ObmParams::make(double sigma_low, double sigma_high, double c) {
  if (!(sigma_low > 0.0) || !(sigma_high >= sigma_low) || !std::isfinite(sigma_high)) {
    std::ostringstream msg;
    msg << "need 0 < sigma_low <= sigma_high, got (" << sigma_low << ", " << sigma_high << ")";
    throw ValidationError(msg.str());
  }
  if (!std::isfinite(c)) throw ValidationError("threshold c must be finite");
  return ObmParams(sigma_low, sigma_high, c);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

double time1_pdf(const ObmParams& p, double y) {
  const double lo = p.sigma_low();
  const double hi = p.sigma_high();
  const double c = p.c();
  const double k = reflection_weight(p);
  // The start point 0 sits on the high-variance side when c > 0 and on the
  // low-variance side when c <= 0; a = (0 - c) / sigma(0).
  const double a = (c > 0.0) ? -c / hi : -c / lo;
  if (y >= c) {
    const double b = (y - c) / lo;
    return (std_normal_pdf(a - b) + k * std_normal_pdf(std::abs(a) + b)) / lo;
  }
  const double b = (c - y) / hi;
  return (std_normal_pdf(a + b) - k * std_normal_pdf(std::abs(a) + b)) / hi;
}

double transition_density(const ObmParams& p, double t, double x, double s, double y) {
  if (!(s > t)) {
    std::ostringstream msg;
    msg << "transition_density needs t < s, got t = " << t << ", s = " << s;
    throw ValidationError(msg.str());
  }
  const double dt = s - t;
  const double root = std::sqrt(dt);
  const double sy = p.sigma(y);
  const double zx = (x - p.c()) / p.sigma(x);
  const double zy = (y - p.c()) / sy;
  const double sign = (y >= p.c()) ? 1.0 : -1.0;
  const double direct = std_normal_pdf((zx - zy) / root);
  const double reflected = std_normal_pdf((std::abs(zx) + std::abs(zy)) / root);
  return (direct + reflection_weight(p) * sign * reflected) / (root * sy);
}

double indicator_prob(const ObmParams& p) {
  const double lo = p.sigma_low();
  const double hi = p.sigma_high();
  const double c = p.c();
  if (c > 0.0) return 2.0 * hi / (hi + lo) * normal_cdf(-c / hi);
  return 1.0 - 2.0 * lo / (hi + lo) * normal_cdf(c / lo);
}

namespace {

double euler_maruyama(const ObmParams& p, double start, double dt, int n_steps,
                      RandomStream& stream, std::vector<double>* trace) {
  const double root = std::sqrt(dt);
  double y = start;
  for (int i = 0; i < n_steps; ++i) {
    y += p.sigma(y) * root * stream.normal();
    if (trace) trace->push_back(y);
  }
  return y;
}

void check_grid(double t_end, int n_steps) {
  if (!(t_end > 0.0)) throw ValidationError("t_end must be positive");
  if (n_steps < 1) throw ValidationError("n_steps must be at least 1");
}

}  // namespace

ObmPath sample_path(const ObmParams& params, double start, double t_end, int n_steps,
                    std::uint64_t seed) {
  check_grid(t_end, n_steps);
  ObmPath path;
  path.seed = seed;
  path.times.reserve(n_steps + 1);
  path.values.reserve(n_steps + 1);
  const double dt = t_end / n_steps;
  for (int i = 0; i <= n_steps; ++i) path.times.push_back(i == n_steps ? t_end : i * dt);
  path.values.push_back(start);
  RandomStream stream(seed, 0);
  euler_maruyama(params, start, dt, n_steps, stream, &path.values);
  return path;
}

std::vector<double> sample_endpoints(const ObmParams& params, double start, double t_end,
                                     int n_steps, std::size_t reps, std::uint64_t seed,
                                     unsigned threads) {
  check_grid(t_end, n_steps);
  std::vector<double> out(reps);
  const double dt = t_end / n_steps;
  parallel_for_chunks(reps, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      RandomStream stream(seed, r);
      out[r] = euler_maruyama(params, start, dt, n_steps, stream, nullptr);
    }
  });
  return out;
}

nlohmann::json to_json(const ObmParams& p) {
  return {{"sigma_low", p.sigma_low()}, {"sigma_high", p.sigma_high()}, {"c", p.c()}};
}

}  // namespace labandit
