#include <doctest.h>

#include <cmath>
#include <random>

#include "labandit/errors.hpp"
#include "labandit/utility.hpp"

using namespace labandit;

namespace {

// Written out by hand for phi1(x) = 1 - exp(-x).
double exp_index(double x, double c, double theta) {
  if (x >= c) return 1.0 - std::exp(-(x - c));
  return -(1.0 - std::exp(theta * (x - c))) / theta;
}

}  // namespace

TEST_CASE("exponential index matches its two-branch formula") {
  const double cs[] = {-1.0, 0.0, 0.7};
  const double thetas[] = {0.25, 0.5, 1.0};
  for (double c : cs) {
    for (double theta : thetas) {
      const auto u = make_utility(Phi1Spec::exponential(), c, theta);
      for (double x = -5.0; x <= 5.0; x += 0.125) {
        CHECK(u(x) == doctest::Approx(exp_index(x, c, theta)).epsilon(1e-14));
        CHECK(eval_utility(u, x) == u(x));
      }
      CHECK(u(c) == 0.0);
    }
  }
}

TEST_CASE("known values of the exponential index") {
  const auto u = make_utility(Phi1Spec::exponential(), 0.0, 0.5);
  CHECK(u(1.0) == doctest::Approx(0.6321205588285577).epsilon(1e-15));
  CHECK(u(-1.0) == doctest::Approx(-0.7869386805747332).epsilon(1e-15));
}

TEST_CASE("loss aversion measure is 1/theta - 1") {
  for (double theta : {0.1, 0.3, 0.5, 0.8, 1.0}) {
    for (double c : {-0.5, 0.0, 2.0}) {
      const auto u = make_utility(Phi1Spec::exponential(), c, theta);
      CHECK(loss_aversion_measure(u) == doctest::Approx(1.0 / theta - 1.0).epsilon(1e-14));
    }
  }
  const Phi1Registry registry;
  const auto atan_u = make_utility(registry.get("custom:atan"), 0.0, 0.4);
  CHECK(loss_aversion_measure(atan_u) == doctest::Approx(1.5));
}

TEST_CASE("property: index is increasing, zero at c, and losses loom larger") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> cdist(-2.0, 2.0);
  std::uniform_real_distribution<double> tdist(0.05, 1.0);
  std::uniform_real_distribution<double> xdist(-6.0, 6.0);
  std::uniform_real_distribution<double> gain(0.01, 6.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double c = cdist(rng);
    const double theta = tdist(rng);
    const auto u = make_utility(Phi1Spec::exponential(), c, theta);
    const double a = xdist(rng);
    const double b = xdist(rng);
    if (a < b) CHECK(u(a) < u(b));
    const double x = gain(rng);
    // Mirror-image losses weigh at least as much as gains.
    CHECK(-u(c - x) >= u(c + x) - 1e-15);
    // (c + x, p / theta; c - x / theta, p) ~ 0 and (c + theta x, p; c - x, theta p) ~ 0.
    const double lambda = 1.0 / theta;
    CHECK(std::fabs(lambda * u(c + x) + u(c - lambda * x)) < 1e-12);
    CHECK(std::fabs(u(c + theta * x) + theta * u(c - x)) < 1e-12);
  }
}

TEST_CASE("invalid utilities are rejected") {
  CHECK_THROWS_AS(make_utility(Phi1Spec::exponential(), 0.0, 0.0), ValidationError);
  CHECK_THROWS_AS(make_utility(Phi1Spec::exponential(), 0.0, 1.5), ValidationError);
  CHECK_THROWS_AS(make_utility(Phi1Spec::exponential(), 0.0, -0.2), ValidationError);
  CHECK_THROWS_AS(make_utility(Phi1Spec::exponential(), NAN, 0.5), ValidationError);
  const auto convex = Phi1Spec::custom("square", [](double x) { return x * x; }, 2.0);
  CHECK_THROWS_AS(make_utility(convex, 0.0, 0.5), ValidationError);
  const auto offset = Phi1Spec::custom("offset", [](double x) { return 1.0 - std::exp(-x) + 0.1; }, 1.0);
  CHECK_THROWS_AS(make_utility(offset, 0.0, 0.5), ValidationError);
  const auto decreasing = Phi1Spec::custom("neg", [](double x) { return -x; }, 1.0);
  CHECK_THROWS_AS(make_utility(decreasing, 0.0, 0.5), ValidationError);
}

TEST_CASE("registry and JSON round trip") {
  Phi1Registry registry;
  CHECK(registry.contains("exponential"));
  CHECK(registry.contains("custom:atan"));
  CHECK_FALSE(registry.contains("custom:nope"));
  CHECK_THROWS_AS(registry.get("custom:nope"), ValidationError);
  registry.add(Phi1Spec::custom("sqrt1p", [](double x) { return std::sqrt(1.0 + x) - 1.0; }, 1.0));
  CHECK(registry.contains("custom:sqrt1p"));

  const auto u = make_utility(registry.get("custom:sqrt1p"), 0.25, 0.6);
  const auto j = to_json(u);
  CHECK(j.at("phi1") == "custom:sqrt1p");
  const auto back = utility_from_json(j, registry);
  CHECK(back.c() == 0.25);
  CHECK(back.theta() == 0.6);
  for (double x = -3.0; x <= 3.0; x += 0.5) CHECK(back(x) == u(x));

  CHECK_THROWS_AS(utility_from_json(nlohmann::json{{"phi1", "exponential"}, {"c", 0.0}}),
                  ValidationError);
  CHECK_THROWS_AS(utility_from_json(nlohmann::json{{"phi1", "exponential"}, {"c", "x"}, {"theta", 0.5}}),
                  ValidationError);
}
