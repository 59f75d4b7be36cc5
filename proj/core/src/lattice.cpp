#include "labandit/lattice.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>
#include <limits>
#include <numeric>

#include <boost/multiprecision/cpp_int.hpp>

#include "labandit/errors.hpp"

namespace labandit {

namespace {

constexpr std::int64_t kMaxDenominator = 1'000'000;

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw ValidationError("outcome must be finite");
  for (std::int64_t den = 1; den <= kMaxDenominator; ++den) {
    const double scaled = x * static_cast<double>(den);
    const double rounded = std::round(scaled);
    // A few ulps: 1/3 written as 0.333... is accepted, sqrt(2) is not.
    const double ulps = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(scaled));
    if (std::abs(scaled - rounded) <= ulps && std::abs(rounded) < 9e15) {
      return make_rational(static_cast<std::int64_t>(rounded), den);
    }
  }
  throw ValidationError("outcome " + std::to_string(x) +
                        " is not a rational with denominator <= 10^6; pass it as \"p/q\"");
}

}  // namespace

Rational make_rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw ValidationError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  return Rational{num / g, den / g};
}

Rational rational_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return make_rational(j.get<std::int64_t>(), 1);
  if (j.is_number()) return rational_from_double(j.get<double>());
  if (j.is_string()) {
    const auto text = j.get<std::string>();
    const auto slash = text.find('/');
    try {
      if (slash == std::string::npos) return make_rational(std::stoll(text), 1);
      return make_rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
    } catch (const std::logic_error&) {
      throw ValidationError("cannot parse rational '" + text + "'");
    }
  }
  throw ValidationError("outcome must be a number or a \"p/q\" string");
}

nlohmann::json to_json(const Rational& r) {
  if (r.den == 1) return r.num;
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

int compare_scaled(std::int64_t m, double c, std::int64_t scale, std::int64_t n) {
  using boost::multiprecision::cpp_int;
  if (scale <= 0 || n <= 0) throw ValidationError("compare_scaled: scale and n must be positive");
  const int sign_m = (m > 0) - (m < 0);
  const int sign_t = (c > 0.0) - (c < 0.0);
  if (sign_t == 0) return sign_m;
  if (sign_m != sign_t) return sign_m == 0 ? -sign_t : sign_m;

  // c is read as its shortest round-trip decimal digits * 10^exponent, so
  // 0.3 means 3/10 rather than the nearest binary fraction.
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, std::abs(c), std::chars_format::scientific);
  const std::string text(buf, res.ptr);
  const auto e_pos = text.find('e');
  std::string digits = text.substr(0, e_pos);
  digits.erase(std::remove(digits.begin(), digits.end(), '.'), digits.end());
  const int exponent = std::stoi(text.substr(e_pos + 1)) - static_cast<int>(digits.size() - 1);
  const cpp_int mantissa(digits);

  cpp_int lhs = cpp_int(m) * m;
  cpp_int rhs = mantissa * mantissa * scale * scale * n;
  const cpp_int shift = boost::multiprecision::pow(cpp_int(10), 2 * std::abs(exponent));
  if (exponent >= 0) {
    rhs *= shift;
  } else {
    lhs *= shift;
  }
  const int magnitude = lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
  return sign_m > 0 ? magnitude : -magnitude;
}

ScaledThreshold::ScaledThreshold(double c, std::int64_t scale, std::int64_t n) {
  if (!std::isfinite(c)) throw ValidationError("threshold must be finite");
  const long double target =
      static_cast<long double>(c) * scale * std::sqrt(static_cast<long double>(n));
  if (std::abs(target) > 4e18L) throw ValidationError("threshold out of lattice range");
  auto s = static_cast<std::int64_t>(std::ceil(target));
  while (compare_scaled(s - 1, c, scale, n) >= 0) --s;
  while (compare_scaled(s, c, scale, n) < 0) ++s;
  first_at_or_above_ = s;
  boundary_is_lattice_point_ = compare_scaled(s, c, scale, n) == 0;
}

}  // namespace labandit
