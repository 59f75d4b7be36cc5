#include "labandit/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "labandit/errors.hpp"

namespace labandit {

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, unsigned max_depth) {
  if (a == b) return {};
  QuadResult out;
  out.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, max_depth, rel_tol, &out.error);
  return out;
}

QuadResult integrate_pieces(const std::function<double(double)>& f,
                            std::span<const double> breakpoints, double rel_tol,
                            unsigned max_depth) {
  QuadResult total;
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (breakpoints[i] < breakpoints[i - 1]) {
      throw ValidationError("integrate_pieces: breakpoints must be nondecreasing");
    }
    const auto piece = integrate(f, breakpoints[i - 1], breakpoints[i], rel_tol, max_depth);
    total.value += piece.value;
    total.error += piece.error;
  }
  return total;
}

}  // namespace labandit
