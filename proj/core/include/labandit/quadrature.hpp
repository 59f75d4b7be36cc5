#pragma once

#include <functional>
#include <span>

namespace labandit {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive 15-point Gauss-Kronrod on [a, b] (finite). `rel_tol` is relative
/// to the L1 norm of the integrand.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-12, unsigned max_depth = 30);

/// Sums `integrate` over consecutive breakpoints. Breakpoints must be
/// nondecreasing; use them to put jump discontinuities on interval ends.
QuadResult integrate_pieces(const std::function<double(double)>& f,
                            std::span<const double> breakpoints, double rel_tol = 1e-12,
                            unsigned max_depth = 30);

}  // namespace labandit
