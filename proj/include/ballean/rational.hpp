#ifndef BALLEAN_RATIONAL_HPP
#define BALLEAN_RATIONAL_HPP

#include <boost/rational.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace ballean {

// All scales and distances are exact rationals. Verdicts are combinatorial
// certificates and must be bit-reproducible, so no floating point anywhere.
using Rational = boost::rational<std::int64_t>;

inline Rational rat(std::int64_t n) { return Rational(n); }
inline Rational rat(std::int64_t n, std::int64_t d) { return Rational(n, d); }

// Largest integer k with k <= q. q may be negative.
inline std::int64_t rational_floor(const Rational& q) {
  std::int64_t n = q.numerator();
  std::int64_t d = q.denominator();  // boost keeps d > 0
  std::int64_t t = n / d;
  if (n % d != 0 && n < 0) --t;
  return t;
}

inline std::int64_t rational_ceil(const Rational& q) {
  return -rational_floor(-q);
}

inline Rational rational_abs(const Rational& q) {
  return q < Rational(0) ? -q : q;
}

// Renders "p/q", or just "p" when q == 1.
inline std::string to_string(const Rational& q) {
  std::string s = std::to_string(q.numerator());
  if (q.denominator() != 1) {
    s += '/';
    s += std::to_string(q.denominator());
  }
  return s;
}

// Parses "p" or "p/q" with optional sign. Returns nullopt on malformed text.
inline std::optional<Rational> parse_rational(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::size_t slash = text.find('/');
  auto parse_int = [](const std::string& s, std::int64_t& out) -> bool {
    if (s.empty()) return false;
    std::size_t i = 0;
    bool neg = false;
    if (s[0] == '+' || s[0] == '-') {
      neg = (s[0] == '-');
      i = 1;
      if (i == s.size()) return false;
    }
    std::int64_t v = 0;
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') return false;
      if (v > (INT64_MAX - (s[i] - '0')) / 10) return false;
      v = v * 10 + (s[i] - '0');
    }
    out = neg ? -v : v;
    return true;
  };
  std::int64_t num = 0, den = 1;
  if (slash == std::string::npos) {
    if (!parse_int(text, num)) return std::nullopt;
  } else {
    if (!parse_int(text.substr(0, slash), num)) return std::nullopt;
    if (!parse_int(text.substr(slash + 1), den)) return std::nullopt;
    if (den == 0) return std::nullopt;
  }
  return Rational(num, den);
}

}  // namespace ballean

#endif  // BALLEAN_RATIONAL_HPP
