#pragma once

#include <functional>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "labandit/config.hpp"

namespace labandit {

/// Gain-domain index phi1 : [0, inf) -> R with phi1(0) = 0, increasing and
/// concave. Only grid-checked; smoothness is taken on trust.
struct Phi1Spec {
  enum class Kind { exponential, custom };

  Kind kind = Kind::exponential;
  /// "exponential" or "custom:<name>".
  std::string name = "exponential";
  std::function<double(double)> eval;
  /// Declared bound on |phi1'|, |phi1''|, |phi1'''|; informational.
  double derivative_bound = 1.0;

  /// phi1(x) = 1 - exp(-x).
  static Phi1Spec exponential();
  static Phi1Spec custom(std::string name, std::function<double(double)> f,
                         double derivative_bound);
};

/// Named phi1 implementations available to JSON configs. Starts with
/// "exponential" and "custom:atan".
class Phi1Registry {
 public:
  Phi1Registry();

  void add(Phi1Spec spec);
  const Phi1Spec& get(const std::string& name) const;
  bool contains(const std::string& name) const;

 private:
  std::map<std::string, Phi1Spec> specs_;
};

/// The loss-averse index
///   phi(x) = phi1(x - c)                        x >= c
///   phi(x) = -phi1(-theta (x - c)) / theta      x <  c
/// Immutable once built.
class UtilityIndex {
 public:
  double operator()(double x) const;

  const Phi1Spec& phi1() const { return phi1_; }
  double c() const { return c_; }
  double theta() const { return theta_; }

 private:
  friend UtilityIndex make_utility(Phi1Spec, double, double, const Tolerances&);
  UtilityIndex(Phi1Spec phi1, double c, double theta)
      : phi1_(std::move(phi1)), c_(c), theta_(theta) {}

  Phi1Spec phi1_;
  double c_;
  double theta_;
};

/// Builds the index after checking theta in (0, 1], phi1(0) = 0 and the
/// monotonicity/concavity of phi1 on x = 0, 0.01, ..., 10.
UtilityIndex make_utility(Phi1Spec phi1, double c, double theta,
                          const Tolerances& tol = kTolerances);

double eval_utility(const UtilityIndex& u, double x);

/// Returns theta^-1 - 1. Before returning, verifies on a grid of (x, p) that
/// (c + x, lambda p; c - lambda x, p) ~ 0 with lambda = 1/theta and that
/// (c + theta x, p; c - x, theta p) ~ 0; throws SelfCheckError otherwise.
double loss_aversion_measure(const UtilityIndex& u,
                             const Tolerances& tol = kTolerances);

nlohmann::json to_json(const UtilityIndex& u);
UtilityIndex utility_from_json(const nlohmann::json& j,
                               const Phi1Registry& registry = Phi1Registry{});

}  // namespace labandit
