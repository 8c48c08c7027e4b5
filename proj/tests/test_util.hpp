#pragma once

#include <random>
#include <string>
#include <vector>

#include "lcdde/measure.hpp"
#include "lcdde/polynomial.hpp"
#include "lcdde/system.hpp"

namespace lcdde::fixture {

inline Rational q(const std::string& s) { return parse_rational(s); }

/// n / d in canonical form; gmpxx leaves two-argument construction unreduced.
inline Rational frac(long n, long d) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

inline DiracSumMeasure measure(const std::vector<std::pair<std::string, std::string>>& atoms) {
  std::vector<std::pair<Rational, Rational>> raw;
  for (const auto& [lag, w] : atoms) raw.emplace_back(q(lag), q(w));
  return normalize(raw);
}

/// Random measure with at most `max_atoms` atoms, lags k/den in [0, 10].
inline DiracSumMeasure random_measure(std::mt19937_64& rng, int max_atoms = 12, int den = 4) {
  std::uniform_int_distribution<int> count(1, max_atoms);
  std::uniform_int_distribution<int> lag(0, 10 * den);
  std::uniform_int_distribution<int> num(-9, 9);
  std::uniform_int_distribution<int> wden(1, 5);
  std::vector<std::pair<Rational, Rational>> raw;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) raw.emplace_back(frac(lag(rng), den), frac(num(rng), wden(rng)));
  return normalize(raw);
}

inline RationalPolynomial random_polynomial(std::mt19937_64& rng, int max_degree) {
  std::uniform_int_distribution<int> deg(0, max_degree);
  std::uniform_int_distribution<int> num(-6, 6);
  std::vector<Rational> c(static_cast<size_t>(deg(rng)) + 1);
  for (auto& v : c) v = Rational(num(rng));
  if (c.back() == 0) c.back() = 1;
  return RationalPolynomial(std::move(c));
}

inline RationalMatrix matrix(const std::vector<std::vector<std::string>>& rows) {
  RationalMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < rows[r].size(); ++c) m(r, c) = q(rows[r][c]);
  return m;
}

/// Commensurable system with rational delays.
inline SystemSpec system(size_t d, size_t m, const std::vector<std::string>& delays,
                         const std::vector<RationalMatrix>& a, const RationalMatrix& b) {
  SystemSpec spec;
  spec.d = d;
  spec.m = m;
  for (const auto& l : delays) spec.delays.emplace_back(q(l));
  spec.a = a;
  spec.b = b;
  return spec;
}

inline SystemSpec scalar_system(const std::string& a, const std::string& b, const std::string& delay = "1") {
  return system(1, 1, {delay}, {matrix({{a}})}, matrix({{b}}));
}

}  // namespace lcdde::fixture
