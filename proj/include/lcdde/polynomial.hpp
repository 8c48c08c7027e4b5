#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "lcdde/error.hpp"
#include "lcdde/rational.hpp"

namespace lcdde {

/// Dense univariate polynomial over Q, coefficients in ascending degree.
/// The highest stored coefficient is nonzero; the zero polynomial is empty.
class RationalPolynomial {
 public:
  RationalPolynomial() = default;
  explicit RationalPolynomial(std::vector<Rational> ascending) : coeffs_(std::move(ascending)) { trim(); }
  RationalPolynomial(std::initializer_list<Rational> ascending) : coeffs_(ascending) { trim(); }

  static RationalPolynomial constant(const Rational& c) { return RationalPolynomial({c}); }
  static RationalPolynomial monomial(size_t degree, const Rational& c = 1) {
    std::vector<Rational> v(degree + 1, Rational(0));
    v[degree] = c;
    return RationalPolynomial(std::move(v));
  }

  const std::vector<Rational>& coefficients() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  /// Degree; -1 for the zero polynomial.
  long degree() const { return static_cast<long>(coeffs_.size()) - 1; }
  bool is_nonzero_constant() const { return coeffs_.size() == 1; }
  Rational coefficient(size_t k) const { return k < coeffs_.size() ? coeffs_[k] : Rational(0); }
  const Rational& leading() const { return coeffs_.back(); }

  RationalPolynomial monic() const {
    if (is_zero()) return *this;
    RationalPolynomial out = *this;
    Rational lc = leading();
    for (auto& c : out.coeffs_) c /= lc;
    return out;
  }

  std::complex<double> eval(std::complex<double> x) const {
    std::complex<double> acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + to_double(*it);
    return acc;
  }

  Rational eval(const Rational& x) const {
    Rational acc(0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  friend RationalPolynomial operator+(const RationalPolynomial& a, const RationalPolynomial& b) {
    std::vector<Rational> out(std::max(a.coeffs_.size(), b.coeffs_.size()), Rational(0));
    for (size_t i = 0; i < a.coeffs_.size(); ++i) out[i] += a.coeffs_[i];
    for (size_t i = 0; i < b.coeffs_.size(); ++i) out[i] += b.coeffs_[i];
    return RationalPolynomial(std::move(out));
  }
  friend RationalPolynomial operator-(const RationalPolynomial& a, const RationalPolynomial& b) {
    return a + Rational(-1) * b;
  }
  friend RationalPolynomial operator*(const Rational& k, const RationalPolynomial& p) {
    std::vector<Rational> out = p.coeffs_;
    for (auto& c : out) c *= k;
    return RationalPolynomial(std::move(out));
  }
  friend RationalPolynomial operator*(const RationalPolynomial& a, const RationalPolynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> out(a.coeffs_.size() + b.coeffs_.size() - 1, Rational(0));
    for (size_t i = 0; i < a.coeffs_.size(); ++i)
      for (size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return RationalPolynomial(std::move(out));
  }
  friend bool operator==(const RationalPolynomial& a, const RationalPolynomial& b) { return a.coeffs_ == b.coeffs_; }

  std::string str() const {
    if (is_zero()) return "0";
    std::string out;
    for (size_t k = 0; k < coeffs_.size(); ++k) {
      if (coeffs_[k] == 0) continue;
      if (!out.empty()) out += " + ";
      out += "(" + to_string(coeffs_[k]) + ")";
      if (k == 1) out += "*x";
      if (k > 1) out += "*x^" + std::to_string(k);
    }
    return out;
  }

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  }

  std::vector<Rational> coeffs_;
};

/// Euclidean division a = q*b + r with deg r < deg b.
inline std::pair<RationalPolynomial, RationalPolynomial> divmod(const RationalPolynomial& a,
                                                                const RationalPolynomial& b) {
  if (b.is_zero()) throw Error(ErrorKind::kInvalidInput, "polynomial division by zero");
  std::vector<Rational> rem = a.coefficients();
  const long db = b.degree();
  if (a.degree() < db) return {RationalPolynomial(), a};
  std::vector<Rational> quot(static_cast<size_t>(a.degree() - db + 1), Rational(0));
  for (long k = a.degree(); k >= db; --k) {
    Rational c = rem[static_cast<size_t>(k)] / b.leading();
    quot[static_cast<size_t>(k - db)] = c;
    if (c == 0) continue;
    for (long j = 0; j <= db; ++j) rem[static_cast<size_t>(k - db + j)] -= c * b.coefficient(static_cast<size_t>(j));
  }
  return {RationalPolynomial(std::move(quot)), RationalPolynomial(std::move(rem))};
}

struct ExtendedGcd {
  RationalPolynomial gcd;  // monic, or zero when both inputs are zero
  RationalPolynomial s;    // s*a + t*b = gcd
  RationalPolynomial t;
};

inline ExtendedGcd extended_gcd(const RationalPolynomial& a, const RationalPolynomial& b) {
  RationalPolynomial r0 = a, r1 = b;
  RationalPolynomial s0 = RationalPolynomial::constant(1), s1;
  RationalPolynomial t0, t1 = RationalPolynomial::constant(1);
  while (!r1.is_zero()) {
    auto [q, r] = divmod(r0, r1);
    r0 = std::exchange(r1, r);
    s0 = std::exchange(s1, s0 - q * s1);
    t0 = std::exchange(t1, t0 - q * t1);
  }
  if (r0.is_zero()) return {r0, s0, t0};
  Rational inv = 1 / r0.leading();
  return {inv * r0, inv * s0, inv * t0};
}

inline RationalPolynomial polynomial_gcd(const std::vector<RationalPolynomial>& polys) {
  RationalPolynomial g;
  for (const auto& p : polys) g = extended_gcd(g, p).gcd;
  return g;
}

struct PolyBezoutResult {
  bool coprime = false;
  std::vector<RationalPolynomial> cofactors;  // sum_i polys[i] * cofactors[i] == 1 when coprime
  RationalPolynomial gcd;                     // monic gcd of the inputs (evidence when not coprime)
};

/// Cofactors G_i with sum_i P_i G_i = 1, folding pairwise extended Euclid
/// left to right. When the gcd is not constant, `coprime` is false and the
/// gcd is returned as evidence.
inline PolyBezoutResult poly_bezout(const std::vector<RationalPolynomial>& polys) {
  if (polys.empty() || std::all_of(polys.begin(), polys.end(), [](const auto& p) { return p.is_zero(); }))
    throw Error(ErrorKind::kInvalidInput, "poly_bezout needs at least one nonzero polynomial");
  PolyBezoutResult out;
  // Invariant: g == sum_{i < k} polys[i] * cofactors[i].
  RationalPolynomial g;
  out.cofactors.assign(polys.size(), RationalPolynomial());
  for (size_t k = 0; k < polys.size(); ++k) {
    ExtendedGcd e = extended_gcd(g, polys[k]);
    for (size_t i = 0; i < k; ++i) out.cofactors[i] = e.s * out.cofactors[i];
    out.cofactors[k] = e.t;
    g = e.gcd;
  }
  out.gcd = g;
  out.coprime = g.is_nonzero_constant();
  if (!out.coprime) out.cofactors.clear();
  return out;
}

}  // namespace lcdde
