#include "labandit/utility.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "labandit/errors.hpp"

namespace labandit {

namespace {

constexpr double kGridStep = 0.01;
constexpr int kGridPoints = 1001;  // 0, 0.01, ..., 10

void check_phi1_on_grid(const Phi1Spec& phi1, const Tolerances& tol) {
  if (!phi1.eval) throw ValidationError("phi1 '" + phi1.name + "' has no callable");
  const double at_zero = phi1.eval(0.0);
  if (!(std::abs(at_zero) <= tol.exact)) {
    std::ostringstream msg;
    msg << "phi1 '" << phi1.name << "' violates phi1(0) = 0 (got " << at_zero << ")";
    throw ValidationError(msg.str());
  }
  double prev2 = 0.0;
  double prev = at_zero;
  for (int i = 1; i < kGridPoints; ++i) {
    const double cur = phi1.eval(i * kGridStep);
    if (!std::isfinite(cur)) {
      throw ValidationError("phi1 '" + phi1.name + "' is not finite on [0, 10]");
    }
    if (!(cur > prev)) {
      std::ostringstream msg;
      msg << "phi1 '" << phi1.name << "' is not strictly increasing near x = " << i * kGridStep;
      throw ValidationError(msg.str());
    }
    // Second differences may round to tiny positive values where phi1 is
    // nearly linear; allow a few ulps of the function value.
    if (i >= 2) {
      const double second = cur - 2.0 * prev + prev2;
      const double slack = 8.0 * std::numeric_limits<double>::epsilon() *
                           (std::abs(cur) + std::abs(prev) + std::abs(prev2));
      if (second > slack) {
        std::ostringstream msg;
        msg << "phi1 '" << phi1.name << "' is not concave near x = " << (i - 1) * kGridStep;
        throw ValidationError(msg.str());
      }
    }
    prev2 = prev;
    prev = cur;
  }
}

}  // namespace

Phi1Spec Phi1Spec::exponential() {
  Phi1Spec spec;
  spec.kind = Kind::exponential;
  spec.name = "exponential";
  spec.eval = [](double x) { return -std::expm1(-x); };
  spec.derivative_bound = 1.0;
  return spec;
}

Phi1Spec Phi1Spec::custom(std::string name, std::function<double(double)> f,
                          double derivative_bound) {
  Phi1Spec spec;
  spec.kind = Kind::custom;
  spec.name = name.starts_with("custom:") ? std::move(name) : "custom:" + name;
  spec.eval = std::move(f);
  spec.derivative_bound = derivative_bound;
  return spec;
}

Phi1Registry::Phi1Registry() {
  add(Phi1Spec::exponential());
  add(Phi1Spec::custom("atan", [](double x) { return std::atan(x); }, 2.0));
}

void Phi1Registry::add(Phi1Spec spec) {
  auto name = spec.name;
  specs_.insert_or_assign(std::move(name), std::move(spec));
}

const Phi1Spec& Phi1Registry::get(const std::string& name) const {
  auto it = specs_.find(name);
  if (it == specs_.end()) throw ValidationError("unknown phi1 '" + name + "'");
  return it->second;
}

bool Phi1Registry::contains(const std::string& name) const {
  return specs_.count(name) != 0;
}

double UtilityIndex::operator()(double x) const {
  if (x >= c_) return phi1_.eval(x - c_);
  return -phi1_.eval(-theta_ * (x - c_)) / theta_;
}

UtilityIndex make_utility(Phi1Spec phi1, double c, double theta, const Tolerances& tol) {
  if (!std::isfinite(c)) throw ValidationError("reference point c must be finite");
  if (!(theta > 0.0 && theta <= 1.0)) {
    std::ostringstream msg;
    msg << "theta must lie in (0, 1], got " << theta;
    throw ValidationError(msg.str());
  }
  check_phi1_on_grid(phi1, tol);
  return UtilityIndex(std::move(phi1), c, theta);
}

double eval_utility(const UtilityIndex& u, double x) { return u(x); }

double loss_aversion_measure(const UtilityIndex& u, const Tolerances& tol) {
  const double lambda = 1.0 / u.theta();
  const double c = u.c();
  for (int ix = 1; ix <= 50; ++ix) {
    const double x = 0.1 * ix;
    for (int ip = 1; ip <= 9; ++ip) {
      const double p = 0.1 * ip;
      // (c + x, lambda p; c - lambda x, p) ~ 0
      const double lam_form = lambda * p * u(c + x) + p * u(c - lambda * x);
      // (c + theta x, p; c - x, theta p) ~ 0
      const double alpha_form = p * u(c + u.theta() * x) + u.theta() * p * u(c - x);
      if (std::abs(lam_form) > tol.identity || std::abs(alpha_form) > tol.identity) {
        std::ostringstream msg;
        msg << "loss-aversion indifference fails at x = " << x << ", p = " << p
            << " (residuals " << lam_form << ", " << alpha_form << ")";
        throw SelfCheckError(msg.str());
      }
    }
  }
  return lambda - 1.0;
}

nlohmann::json to_json(const UtilityIndex& u) {
  return nlohmann::json{{"phi1", u.phi1().name}, {"c", u.c()}, {"theta", u.theta()}};
}

UtilityIndex utility_from_json(const nlohmann::json& j, const Phi1Registry& registry) {
  if (!j.is_object()) throw ValidationError("utility config must be a JSON object");
  for (const char* key : {"phi1", "c", "theta"}) {
    if (!j.contains(key)) throw ValidationError(std::string("utility config missing '") + key + "'");
  }
  if (!j.at("phi1").is_string()) throw ValidationError("utility 'phi1' must be a string");
  if (!j.at("c").is_number() || !j.at("theta").is_number()) {
    throw ValidationError("utility 'c' and 'theta' must be numbers");
  }
  return make_utility(registry.get(j.at("phi1").get<std::string>()), j.at("c").get<double>(),
                      j.at("theta").get<double>());
}

}  // namespace labandit
