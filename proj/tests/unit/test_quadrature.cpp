#include <doctest.h>

#include <cmath>
#include <vector>

#include "labandit/quadrature.hpp"

using namespace labandit;

TEST_CASE("smooth integrands") {
  CHECK(integrate([](double x) { return x * x; }, 0.0, 3.0).value ==
        doctest::Approx(9.0).epsilon(1e-14));
  CHECK(integrate([](double x) { return std::exp(-x * x / 2); }, -12.0, 12.0).value ==
        doctest::Approx(std::sqrt(2 * M_PI)).epsilon(1e-13));
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI).value ==
        doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("jump placed on a breakpoint is integrated exactly") {
  const auto step = [](double x) { return x >= 0.3 ? 2.0 : -1.0; };
  const std::vector<double> cuts = {-1.0, 0.3, 2.0};
  const auto r = integrate_pieces(step, cuts);
  CHECK(r.value == doctest::Approx(-1.3 + 3.4).epsilon(1e-14));
  CHECK(r.error >= 0.0);
}

TEST_CASE("zero-width piece contributes nothing") {
  const std::vector<double> same = {1.0, 1.0};
  CHECK(integrate_pieces([](double) { return 1.0; }, same).value == 0.0);
}
