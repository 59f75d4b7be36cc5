#include <doctest.h>

#include <cmath>

#include "labandit/asymptotic_value.hpp"
#include "labandit/bandit.hpp"
#include "labandit/errors.hpp"
#include "oracles.hpp"

using namespace labandit;
using labandit::oracle::simpson_split;

namespace {

const double kGridC[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
const double kGridSigma[][2] = {{0.5, 1.0}, {0.8, 1.0}, {1.0, 2.0}};

UtilityIndex coupled(double c, double lo, double hi) {
  return make_utility(Phi1Spec::exponential(), c, lo / hi);
}

/// Expected index under N(0, sigma^2), by Simpson.
double gaussian_expectation(const UtilityIndex& u, double sigma) {
  const auto f = [&](double y) {
    return u(y) * std::exp(-0.5 * y * y / (sigma * sigma)) / (sigma * std::sqrt(2 * M_PI));
  };
  return simpson_split(f, -14 * sigma, u.c(), 14 * sigma, 40000);
}

}  // namespace

TEST_CASE("closed form agrees with quadrature on the parameter grid") {
  for (const auto& s : kGridSigma) {
    for (double c : kGridC) {
      const auto params = ObmParams::make(s[0], s[1], c);
      const auto q = value_by_quadrature(coupled(c, s[0], s[1]), params);
      const auto cf = value_exponential_closed_form(c, s[0], s[1]);
      CAPTURE(c);
      CHECK(std::fabs(q.v - cf.v) < 1e-6);
      CHECK(q.method == ValueMethod::quadrature);
      CHECK(cf.method == ValueMethod::closed_form_exponential);
      CHECK(q.error_estimate >= 0.0);
    }
  }
}

TEST_CASE("quadrature value agrees with an independent Simpson rule") {
  for (const auto& s : kGridSigma) {
    for (double c : kGridC) {
      const auto params = ObmParams::make(s[0], s[1], c);
      const auto u = coupled(c, s[0], s[1]);
      const auto f = [&](double y) { return u(y) * time1_pdf(params, y); };
      const double lo = std::min(c, 0.0) - 12 * s[1];
      const double hi = std::max(c, 0.0) + 12 * s[1];
      const double ref = simpson_split(f, lo, c, hi, 40000);
      CHECK(value_by_quadrature(u, params).v == doctest::Approx(ref).epsilon(1e-10));
    }
  }
}

TEST_CASE("value vanishes at c = 0 and has the sign of c otherwise") {
  for (const auto& s : kGridSigma) {
    CHECK(value_exponential_closed_form(0.0, s[0], s[1]).v == 0.0);
    CHECK(std::fabs(value_by_quadrature(coupled(0.0, s[0], s[1]), ObmParams::make(s[0], s[1], 0.0)).v) <
          1e-12);
    for (double c : kGridC) {
      if (c == 0.0) continue;
      const auto u = coupled(c, s[0], s[1]);
      const double gap = value_by_quadrature(u, ObmParams::make(s[0], s[1], c)).v - u(0.0);
      CHECK(std::signbit(gap) == std::signbit(c));
    }
  }
}

TEST_CASE("frozen values") {
  // Computed by Simpson quadrature of the index against the time-1 density.
  CHECK(value_by_quadrature(coupled(-0.5, 0.5, 1.0), ObmParams::make(0.5, 1.0, -0.5)).v ==
        doctest::Approx(0.3322670395).epsilon(1e-9));
  CHECK(value_exponential_closed_form(-0.5, 0.5, 1.0).v ==
        doctest::Approx(0.3322670395).epsilon(1e-9));
  // phi(0) for c = -0.5 is 1 - exp(-0.5).
  CHECK(coupled(-0.5, 0.5, 1.0)(0.0) == doctest::Approx(0.3934693403).epsilon(1e-10));
}

TEST_CASE("value depends only on the extreme sigmas, threshold and index") {
  const auto menu_a = oracle::reference_env();
  const auto menu_b = NoLearningEnv::make({
      ArmSpec{"", {make_rational(-1, 2), make_rational(1, 2)}, {0.5, 0.5}},
      ArmSpec{"", {make_rational(-3, 4), make_rational(0, 1), make_rational(3, 4)}, {0.4, 0.2, 0.4}},
      ArmSpec{"", {make_rational(-1, 1), make_rational(1, 1)}, {0.5, 0.5}},
  });
  const auto value_for = [](const Environment& env) {
    const double lo = env_sigma_low(env), hi = env_sigma_high(env);
    return value_by_quadrature(coupled(0.3, lo, hi), ObmParams::make(lo, hi, 0.3));
  };
  const auto a = value_for(menu_a);
  const auto b = value_for(menu_b);
  CHECK(a.v == b.v);
  CHECK(a.error_estimate == b.error_estimate);
  CHECK(to_json(a) == to_json(b));
}

TEST_CASE("coupling between theta and the sigmas is enforced") {
  const auto params = ObmParams::make(0.5, 1.0, 0.0);
  CHECK_THROWS_AS(value_by_quadrature(coupled(0.0, 0.6, 1.0), params), ValidationError);
  CHECK_THROWS_AS(value_by_quadrature(coupled(0.2, 0.5, 1.0), params), ValidationError);
  CHECK_NOTHROW(check_coupling(coupled(0.0, 0.5, 1.0), params));
}

TEST_CASE("single-arm benchmark is negative for theta < 1 at c = 0") {
  const auto u = coupled(0.0, 0.5, 1.0);
  CHECK(gaussian_expectation(u, 0.5) < 0.0);
  CHECK(gaussian_expectation(u, 1.0) < 0.0);
  CHECK(value_by_quadrature(u, ObmParams::make(0.5, 1.0, 0.0)).v >
        std::max(gaussian_expectation(u, 0.5), gaussian_expectation(u, 1.0)));
}

TEST_CASE("H_t boundary values and argument checks") {
  const auto params = ObmParams::make(0.5, 1.0, 0.2);
  const auto u = coupled(0.2, 0.5, 1.0);
  const double h = 0.1;
  for (double x : {-2.0, 0.0, 0.2, 1.5}) CHECK(ht_value(u, params, 1.0 + h, x, h) == u(x));
  const auto f = [&](double y) { return u(y) * transition_density(params, 0.0, 0.0, 1.0 + h, y); };
  const double ref = simpson_split(f, -14.0, 0.2, 14.0, 40000);
  CHECK(ht_value(u, params, 0.0, 0.0, h) == doctest::Approx(ref).epsilon(1e-10));
  CHECK_THROWS_AS(ht_value(u, params, 1.2, 0.0, h), ValidationError);
  CHECK_THROWS_AS(ht_value(u, params, -0.1, 0.0, h), ValidationError);
  CHECK_THROWS_AS(ht_value(u, params, 0.5, 0.0, 0.0), ValidationError);
}

TEST_CASE("H_t is concave above c and convex below") {
  const auto params = ObmParams::make(0.5, 1.0, 0.0);
  const auto u = coupled(0.0, 0.5, 1.0);
  const double d = 0.05;
  for (double t : {0.0, 0.5, 1.0}) {
    for (double x = -2.0; x <= 2.0; x += 0.25) {
      if (std::fabs(x) < 2 * d) continue;
      const double second = ht_value(u, params, t, x + d, 0.1) - 2 * ht_value(u, params, t, x, 0.1) +
                            ht_value(u, params, t, x - d, 0.1);
      CAPTURE(t);
      CAPTURE(x);
      if (x > 0) CHECK(second <= 1e-12);
      if (x < 0) CHECK(second >= -1e-12);
    }
  }
}

TEST_CASE("H_t semigroup over an intermediate time") {
  const auto params = ObmParams::make(0.5, 1.0, 0.0);
  const auto u = coupled(0.0, 0.5, 1.0);
  const double t = 0.2, r = 0.3, h = 0.1;
  for (double x : {-1.0, 0.0, 1.0}) {
    const auto f = [&](double y) {
      return ht_value(u, params, t + r, y, h) * transition_density(params, t, x, t + r, y);
    };
    const double w = 12.0 * std::sqrt(r);
    const double lhs = simpson_split(f, std::min(x, 0.0) - w, 0.0, std::max(x, 0.0) + w, 2000);
    CHECK(std::fabs(lhs - ht_value(u, params, t, x, h)) < 1e-5);
  }
}
