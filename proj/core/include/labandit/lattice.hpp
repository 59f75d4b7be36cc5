#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace labandit {

/// Exact outcome value num/den with den > 0, in lowest terms.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

Rational make_rational(std::int64_t num, std::int64_t den);

/// Accepts a JSON integer, a JSON number within a few ulps of a fraction with
/// denominator <= 10^6 (e.g. 0.5, 0.25), or a string "p/q".
Rational rational_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Rational& r);

/// Integer threshold equivalent to the real comparison s >= c * scale * sqrt(n)
/// for integer lattice sums s. Built with exact big-integer arithmetic, so a
/// lattice point sitting exactly on the boundary is classified correctly.
class ScaledThreshold {
 public:
  ScaledThreshold(double c, std::int64_t scale, std::int64_t n);

  /// s >= c * scale * sqrt(n)
  bool at_or_above(std::int64_t s) const { return s >= first_at_or_above_; }
  /// s <= c * scale * sqrt(n)
  bool at_or_below(std::int64_t s) const {
    return boundary_is_lattice_point_ ? s <= first_at_or_above_ : s < first_at_or_above_;
  }
  /// True when c * scale * sqrt(n) is itself an integer.
  bool boundary_is_lattice_point() const { return boundary_is_lattice_point_; }
  std::int64_t first_at_or_above() const { return first_at_or_above_; }

 private:
  std::int64_t first_at_or_above_ = 0;
  bool boundary_is_lattice_point_ = false;
};

/// Sign of m - c * scale * sqrt(n), computed exactly with c read as its
/// shortest round-trip decimal (0.3 is 3/10).
int compare_scaled(std::int64_t m, double c, std::int64_t scale, std::int64_t n);

}  // namespace labandit
