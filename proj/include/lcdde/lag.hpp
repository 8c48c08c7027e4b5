#pragma once

#include <cctype>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lcdde/error.hpp"
#include "lcdde/rational.hpp"

namespace lcdde {

/// Label of the implicit generator carrying the purely rational part of a lag.
inline const std::string kUnitLabel = "1";

/// Numeric values of the declared generator labels. Labels are assumed to be
/// rationally independent; nothing here checks that.
class GeneratorTable {
 public:
  GeneratorTable() { values_.emplace(kUnitLabel, 1.0); }

  void declare(const std::string& label, double value) {
    if (label.empty() || label == kUnitLabel)
      throw Error(ErrorKind::kInvalidInput, "cannot redeclare generator '" + label + "'");
    if (!(value > 0.0) || !std::isfinite(value))
      throw Error(ErrorKind::kInvalidInput, "generator '" + label + "' must be positive and finite");
    if (!values_.emplace(label, value).second)
      throw Error(ErrorKind::kInvalidInput, "duplicate generator label '" + label + "'");
  }

  bool contains(const std::string& label) const { return values_.count(label) != 0; }

  double value(const std::string& label) const {
    auto it = values_.find(label);
    if (it == values_.end()) throw Error(ErrorKind::kInvalidInput, "undeclared generator '" + label + "'");
    return it->second;
  }

  const std::map<std::string, double>& values() const { return values_; }

 private:
  std::map<std::string, double> values_;
};

/// A nonnegative lag written as a finite combination sum_j c_j * label_j with
/// exact rational coefficients. Pure rationals live on the "1" label.
class LagExpr {
 public:
  LagExpr() = default;
  LagExpr(const Rational& rational_part) {  // NOLINT(google-explicit-constructor)
    add_term(kUnitLabel, rational_part);
  }
  LagExpr(const std::string& label, const Rational& coefficient) { add_term(label, coefficient); }

  const std::map<std::string, Rational>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }

  bool is_rational() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == kUnitLabel);
  }

  Rational rational_value() const {
    if (!is_rational()) throw Error(ErrorKind::kUnsupportedMesh, "lag " + str() + " is not rational");
    return terms_.empty() ? Rational(0) : terms_.begin()->second;
  }

  Rational coefficient(const std::string& label) const {
    auto it = terms_.find(label);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  double value(const GeneratorTable& table) const {
    double v = 0.0;
    for (const auto& [label, c] : terms_) v += to_double(c) * table.value(label);
    return v;
  }

  LagExpr& operator+=(const LagExpr& other) {
    for (const auto& [label, c] : other.terms_) add_term(label, c);
    return *this;
  }
  friend LagExpr operator+(LagExpr a, const LagExpr& b) { return a += b; }

  friend LagExpr operator*(const Rational& k, const LagExpr& e) {
    LagExpr out;
    if (k == 0) return out;
    if (k < 0) throw Error(ErrorKind::kInvalidLag, "negative lag multiple");
    for (const auto& [label, c] : e.terms_) out.terms_.emplace(label, k * c);
    return out;
  }

  friend bool operator==(const LagExpr& a, const LagExpr& b) { return a.terms_ == b.terms_; }
  // Canonical total order: lexicographic on (label, coefficient). For pure
  // rational lags it coincides with numeric order.
  friend bool operator<(const LagExpr& a, const LagExpr& b) {
    auto ia = a.terms_.begin(), ib = b.terms_.begin();
    for (; ia != a.terms_.end() && ib != b.terms_.end(); ++ia, ++ib) {
      if (ia->first != ib->first) {
        // A missing label on one side means a zero coefficient there.
        return ia->first < ib->first ? false : true;
      }
      if (ia->second != ib->second) return ia->second < ib->second;
    }
    return ia == a.terms_.end() && ib != b.terms_.end();
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [label, c] : terms_) {
      if (!out.empty()) out += " + ";
      out += to_string(c);
      if (label != kUnitLabel) out += " * " + label;
    }
    return out;
  }

 private:
  void add_term(const std::string& label, const Rational& c) {
    if (c < 0) throw Error(ErrorKind::kInvalidLag, "negative coefficient on '" + label + "'");
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(label, c);
    if (!inserted) it->second += c;
  }

  std::map<std::string, Rational> terms_;
};

namespace detail {

inline bool is_label(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s.front())) || s.front() == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

}  // namespace detail

/// Parses "3/2", "3/2 * sqrt2", "sqrt2", "1 + 2*sqrt3". When `table` is given,
/// every label must be declared in it.
inline LagExpr parse_lag(std::string_view text, const GeneratorTable* table = nullptr) {
  LagExpr out;
  std::string_view rest = text;
  if (detail::trim(rest).empty()) throw Error(ErrorKind::kInvalidLag, "empty lag expression");
  while (true) {
    auto plus = rest.find('+');
    std::string_view term = detail::trim(rest.substr(0, plus));
    if (term.empty()) throw Error(ErrorKind::kInvalidLag, "malformed lag '" + std::string(text) + "'");
    Rational coef(1);
    std::string label = kUnitLabel;
    if (auto star = term.find('*'); star != std::string_view::npos) {
      std::string_view lhs = detail::trim(term.substr(0, star));
      std::string_view rhs = detail::trim(term.substr(star + 1));
      if (detail::is_label(rhs)) {
        coef = parse_rational(lhs);
        label = std::string(rhs);
      } else if (detail::is_label(lhs)) {
        coef = parse_rational(rhs);
        label = std::string(lhs);
      } else {
        throw Error(ErrorKind::kInvalidLag, "malformed lag term '" + std::string(term) + "'");
      }
    } else if (detail::is_label(term)) {
      label = std::string(term);
    } else {
      coef = parse_rational(term);
    }
    if (coef < 0) throw Error(ErrorKind::kInvalidLag, "negative coefficient in '" + std::string(text) + "'");
    if (table != nullptr && !table->contains(label))
      throw Error(ErrorKind::kInvalidInput, "undeclared generator label '" + label + "'");
    out += LagExpr(label, coef);
    if (plus == std::string_view::npos) break;
    rest = rest.substr(plus + 1);
  }
  return out;
}

}  // namespace lcdde
