#pragma once

#include <gmpxx.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

#include "lcdde/error.hpp"

namespace lcdde {

using Rational = mpq_class;
using Integer = mpz_class;

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

// Parses [+-]digits[.digits][(e|E)[+-]digits] exactly.
inline Rational parse_decimal(std::string_view s, std::string_view original) {
  auto fail = [&] {
    return Error(ErrorKind::kInvalidInput, "not a rational literal: '" + std::string(original) + "'");
  };
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    s = s.substr(0, e);
    bool exp_neg = false;
    if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
      exp_neg = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    if (!all_digits(exp_part) || exp_part.size() > 6) throw fail();
    std::from_chars(exp_part.data(), exp_part.data() + exp_part.size(), exponent);
    if (exp_neg) exponent = -exponent;
  }
  std::string digits;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) ||
        (!fp.empty() && !all_digits(fp)))
      throw fail();
    digits = std::string(ip) + std::string(fp);
    exponent -= static_cast<long>(fp.size());
  } else {
    if (!all_digits(s)) throw fail();
    digits = std::string(s);
  }
  if (digits.empty()) throw fail();
  Integer mantissa(digits, 10);
  Integer ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
  Rational r = exponent >= 0 ? Rational(mantissa * ten_pow) : Rational(mantissa, ten_pow);
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

}  // namespace detail

/// Accepts "p/q", integers, and decimal literals ("0.25", "-1.5e-3").
inline Rational parse_rational(std::string_view text) {
  std::string_view s = detail::trim(text);
  if (s.empty()) throw Error(ErrorKind::kInvalidInput, "empty rational literal");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Rational num = detail::parse_decimal(detail::trim(s.substr(0, slash)), text);
    Rational den = detail::parse_decimal(detail::trim(s.substr(slash + 1)), text);
    if (den == 0) throw Error(ErrorKind::kInvalidInput, "zero denominator in '" + std::string(text) + "'");
    Rational r = num / den;
    r.canonicalize();
    return r;
  }
  return detail::parse_decimal(s, text);
}

/// Exact conversion of a finite double through its shortest round-trip
/// decimal representation (so 0.1 becomes 1/10, not the binary expansion).
inline Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw Error(ErrorKind::kInvalidInput, "non-finite number");
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return parse_rational(std::string_view(buf, static_cast<size_t>(res.ptr - buf)));
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline double to_double(const Rational& r) { return r.get_d(); }

inline Integer gcd(const Integer& a, const Integer& b) {
  Integer g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline Integer lcm(const Integer& a, const Integer& b) {
  Integer l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

}  // namespace lcdde
