#include "labandit/asymptotic_value.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "labandit/errors.hpp"
#include "labandit/quadrature.hpp"

namespace labandit {

namespace {

constexpr double kTailWidths = 12.0;

}  // namespace

std::string to_string(ValueMethod m) {
  return m == ValueMethod::quadrature ? "quadrature" : "closed-form";
}

void check_coupling(const UtilityIndex& u, const ObmParams& params, const Tolerances& tol) {
  if (std::abs(u.theta() - params.theta()) > tol.coupling) {
    std::ostringstream msg;
    msg << "utility theta " << u.theta() << " differs from sigma_low/sigma_high "
        << params.theta() << "; the limiting value requires them to be equal";
    throw ValidationError(msg.str());
  }
  if (std::abs(u.c() - params.c()) > tol.coupling) {
    std::ostringstream msg;
    msg << "utility reference point " << u.c() << " differs from threshold " << params.c();
    throw ValidationError(msg.str());
  }
}

ValueResult value_by_quadrature(const UtilityIndex& u, const ObmParams& params,
                                const Tolerances& tol) {
  check_coupling(u, params, tol);
  const double c = params.c();
  const double width = kTailWidths * params.sigma_high();
  const std::array<double, 3> cuts{std::min(c, 0.0) - width, c, std::max(c, 0.0) + width};
  const auto quad = integrate_pieces([&](double y) { return u(y) * time1_pdf(params, y); },
                                     cuts, tol.quadrature_rel);
  return ValueResult{quad.value, ValueMethod::quadrature, quad.error, params, u};
}

ValueResult value_exponential_closed_form(double c, double sigma_low, double sigma_high) {
  const auto params = ObmParams::make(sigma_low, sigma_high, c);
  const double lo = sigma_low;
  const double hi = sigma_high;
  const double shift = std::exp(0.5 * lo * lo);
  double v;
  if (c <= 0.0) {
    v = normal_cdf(-c / lo) - normal_cdf(c / lo) +
        shift * (std::exp(-c) * normal_cdf(-lo + c / lo) - std::exp(c) * normal_cdf(-lo - c / lo));
  } else {
    const double tilt = lo * c / hi;
    v = hi / lo *
        (normal_cdf(-c / hi) - normal_cdf(c / hi) +
         shift * (std::exp(-tilt) * normal_cdf(-lo + c / hi) -
                  std::exp(tilt) * normal_cdf(-lo - c / hi)));
  }
  auto utility = make_utility(Phi1Spec::exponential(), c, params.theta());
  return ValueResult{v, ValueMethod::closed_form_exponential, 0.0, params, std::move(utility)};
}

double ht_value(const UtilityIndex& u, const ObmParams& params, double t, double x, double h,
                const Tolerances& tol) {
  if (!(h > 0.0)) throw ValidationError("ht_value: h must be positive");
  const double horizon = 1.0 + h;
  if (!(t >= 0.0 && t <= horizon)) {
    std::ostringstream msg;
    msg << "ht_value: t = " << t << " outside [0, " << horizon << "]";
    throw ValidationError(msg.str());
  }
  if (t == horizon) return u(x);
  const double c = params.c();
  const double width = kTailWidths * params.sigma_high() * std::sqrt(horizon - t);
  const std::array<double, 3> cuts{std::min(c, x) - width, c, std::max(c, x) + width};
  return integrate_pieces(
             [&](double y) { return u(y) * transition_density(params, t, x, horizon, y); },
             cuts, tol.quadrature_rel)
      .value;
}

nlohmann::json to_json(const ValueResult& r) {
  return {{"v", r.v},
          {"method", to_string(r.method)},
          {"error_estimate", r.error_estimate},
          {"params", to_json(r.params)},
          {"utility", to_json(r.utility)}};
}

}  // namespace labandit
