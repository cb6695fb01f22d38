#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <regex>
#include <string>
#include <string_view>

#include "biaslin/error.hpp"

namespace biaslin {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Parses "a/b" or "a". Decimal and exponent forms are rejected: every
/// quantity that crosses this boundary is meant to be exact.
inline Rational parse_rational(std::string_view text) {
  static const std::regex kForm(R"(^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$)");
  std::string s(text);
  std::smatch m;
  if (!std::regex_match(s, m, kForm)) {
    throw ParseError("not an exact rational (expected \"a/b\"): '" + s + "'");
  }
  BigInt num(m[1].str().front() == '+' ? m[1].str().substr(1) : m[1].str());
  BigInt den(1);
  if (m[2].matched) {
    den = BigInt(m[2].str());
    if (den == 0) throw ParseError("zero denominator in '" + s + "'");
  }
  return Rational(num, den);
}

/// Canonical "a/b" form; integers are written "a/1" so files stay uniform.
inline std::string to_string(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Binomial coefficient, zero outside 0 <= r <= n.
inline std::int64_t binomial(int n, int r) {
  if (n < 0 || r < 0 || r > n) return 0;
  std::int64_t out = 1;
  for (int i = 1; i <= r; ++i) out = out * (n - r + i) / i;
  return out;
}

inline BigInt factorial(unsigned n) {
  BigInt out = 1;
  for (unsigned i = 2; i <= n; ++i) out *= i;
  return out;
}

inline Rational rational_min(const Rational& a, const Rational& b) { return a < b ? a : b; }

}  // namespace biaslin
