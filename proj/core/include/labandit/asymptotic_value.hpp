#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "labandit/config.hpp"
#include "labandit/obm.hpp"
#include "labandit/utility.hpp"

namespace labandit {

enum class ValueMethod { quadrature, closed_form_exponential };

std::string to_string(ValueMethod m);

/// Limiting value V = E[phi(W_1^c)] of the large-horizon bandit problem.
struct ValueResult {
  double v = 0.0;
  ValueMethod method = ValueMethod::quadrature;
  /// Quadrature error estimate; 0 for the closed form.
  double error_estimate = 0.0;
  ObmParams params;
  UtilityIndex utility;
};

/// Throws ValidationError unless u.theta() == sigma_low / sigma_high and
/// u.c() == params.c() (within tol.coupling): the limit is only valid there.
void check_coupling(const UtilityIndex& u, const ObmParams& params,
                    const Tolerances& tol = kTolerances);

/// V = integral of phi(y) q(y) dy, split at y = c and truncated 12 sigma_high
/// beyond the support's bulk.
ValueResult value_by_quadrature(const UtilityIndex& u, const ObmParams& params,
                                const Tolerances& tol = kTolerances);

/// Closed form for phi1(x) = 1 - exp(-x) with theta = sigma_low / sigma_high.
ValueResult value_exponential_closed_form(double c, double sigma_low, double sigma_high);

/// H_t(x) = E[phi(Y_{1+h}^{t,x,c})]; returns phi(x) at t = 1 + h.
/// Throws ValidationError for t outside [0, 1 + h] or h <= 0.
double ht_value(const UtilityIndex& u, const ObmParams& params, double t, double x,
                double h = 0.1, const Tolerances& tol = kTolerances);

nlohmann::json to_json(const ValueResult& r);

}  // namespace labandit
