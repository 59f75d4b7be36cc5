#pragma once

namespace labandit {

/// Numeric tolerances shared across modules.
struct Tolerances {
  /// Algebraic identities evaluated in floating point (indifference relations).
  double identity = 1e-10;
  /// Facts that hold exactly up to rounding (phi1(0) = 0, branch continuity).
  double exact = 1e-12;
  /// |theta - sigma_low/sigma_high| and |u.c - params.c| for the CLT coupling.
  double coupling = 1e-12;
  /// |log-odds| below this is treated as the mu = 1/2 tie.
  double belief_tie = 1e-9;
  /// Relative tolerance handed to adaptive Gauss-Kronrod.
  double quadrature_rel = 1e-12;
};

inline constexpr Tolerances kTolerances{};

}  // namespace labandit
