#include <doctest.h>

#include <cmath>
#include <random>

#include "labandit/errors.hpp"
#include "labandit/lattice.hpp"

using namespace labandit;

namespace {

/// Exact sign of m - (p / 2^k) * scale * sqrt(n) in 128-bit integers; valid
/// while every square fits.
int sign_oracle(std::int64_t m, std::int64_t p, int k, std::int64_t scale, std::int64_t n) {
  const __int128 left = static_cast<__int128>(m) << k;  // m 2^k
  const __int128 right = static_cast<__int128>(p) * scale;  // p scale, times sqrt(n)
  const int sl = (left > 0) - (left < 0);
  const int sr = (right > 0) - (right < 0);
  if (sr == 0) return sl;
  if (sl != sr) return sl == 0 ? -sr : sl;
  const __int128 l2 = left * left;
  const __int128 r2 = right * right * n;
  const int mag = (l2 > r2) - (l2 < r2);
  return sl > 0 ? mag : -mag;
}

}  // namespace

TEST_CASE("rationals from JSON") {
  CHECK(rational_from_json(3) == Rational{3, 1});
  CHECK(rational_from_json(-0.5) == Rational{-1, 2});
  CHECK(rational_from_json(0.1) == Rational{1, 10});
  CHECK(rational_from_json("6/8") == Rational{3, 4});
  CHECK(rational_from_json("-2/-4") == Rational{1, 2});
  CHECK(rational_from_json("7") == Rational{7, 1});
  CHECK_THROWS_AS(rational_from_json("1/0"), ValidationError);
  CHECK_THROWS_AS(rational_from_json("x"), ValidationError);
  CHECK_THROWS_AS(rational_from_json(std::sqrt(2.0)), ValidationError);
  CHECK_THROWS_AS(rational_from_json(nlohmann::json::array()), ValidationError);
  CHECK(to_json(Rational{3, 4}) == "3/4");
  CHECK(to_json(Rational{-2, 1}) == -2);
  CHECK(rational_from_json(to_json(make_rational(-9, 12))) == Rational{-3, 4});
}

TEST_CASE("exact boundary comparisons") {
  // 0.5 * 2 * sqrt(10^4) = 100 exactly.
  CHECK(compare_scaled(100, 0.5, 2, 10000) == 0);
  CHECK(compare_scaled(99, 0.5, 2, 10000) == -1);
  CHECK(compare_scaled(101, 0.5, 2, 10000) == 1);
  CHECK(compare_scaled(0, 0.0, 1, 7) == 0);
  CHECK(compare_scaled(-1, 0.0, 1, 7) == -1);
  CHECK(compare_scaled(3, -0.25, 4, 9) == 1);
  CHECK(compare_scaled(-3, -0.25, 4, 9) == 0);
  CHECK_THROWS_AS(compare_scaled(1, 0.5, 0, 4), ValidationError);

  const ScaledThreshold on_point(0.5, 2, 10000);
  CHECK(on_point.boundary_is_lattice_point());
  CHECK(on_point.first_at_or_above() == 100);
  CHECK(on_point.at_or_above(100));
  CHECK(on_point.at_or_below(100));
  CHECK_FALSE(on_point.at_or_above(99));
  CHECK_FALSE(on_point.at_or_below(101));

  const ScaledThreshold off_point(0.5, 1, 2);  // 0.7071...
  CHECK_FALSE(off_point.boundary_is_lattice_point());
  CHECK(off_point.first_at_or_above() == 1);
  CHECK(off_point.at_or_below(0));
  CHECK_FALSE(off_point.at_or_below(1));
}

TEST_CASE("property: comparisons agree with a 128-bit oracle") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> mdist(-5000, 5000);
  std::uniform_int_distribution<std::int64_t> pdist(-64, 64);
  std::uniform_int_distribution<int> kdist(0, 6);
  std::uniform_int_distribution<std::int64_t> sdist(1, 12);
  std::uniform_int_distribution<std::int64_t> ndist(1, 20000);
  for (int trial = 0; trial < 20000; ++trial) {
    const std::int64_t p = pdist(rng);
    const int k = kdist(rng);
    const double c = std::ldexp(static_cast<double>(p), -k);
    const std::int64_t scale = sdist(rng);
    // Bias n toward perfect squares so that ties occur.
    std::int64_t n = ndist(rng);
    if (trial % 3 == 0) n = (n % 140 + 1) * (n % 140 + 1);
    const std::int64_t m = mdist(rng);
    REQUIRE(compare_scaled(m, c, scale, n) == sign_oracle(m, p, k, scale, n));

    const ScaledThreshold th(c, scale, n);
    const std::int64_t f = th.first_at_or_above();
    CHECK(sign_oracle(f, p, k, scale, n) >= 0);
    CHECK(sign_oracle(f - 1, p, k, scale, n) < 0);
    CHECK(th.boundary_is_lattice_point() == (sign_oracle(f, p, k, scale, n) == 0));
    CHECK(th.at_or_below(m) == (sign_oracle(m, p, k, scale, n) <= 0));
  }
}
