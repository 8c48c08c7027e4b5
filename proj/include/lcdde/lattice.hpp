#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "lcdde/error.hpp"
#include "lcdde/lag.hpp"
#include "lcdde/measure.hpp"
#include "lcdde/polynomial.hpp"
#include "lcdde/rational.hpp"

namespace lcdde {

/// r_j = rational_scale * value(label). Distinct labels are declared
/// rationally independent.
struct Generator {
  std::string label;
  Rational rational_scale;
  double value = 0.0;

  LagExpr as_lag() const { return LagExpr(label, rational_scale); }
  friend bool operator==(const Generator& a, const Generator& b) {
    return a.label == b.label && a.rational_scale == b.rational_scale && a.value == b.value;
  }
};

using GeneratorBasis = std::vector<Generator>;

/// Every lag written as sum_j m_j r_j with nonnegative integer exponents.
class DelayDecomposition {
 public:
  DelayDecomposition() = default;
  DelayDecomposition(GeneratorBasis basis, std::vector<LagExpr> lags, std::vector<std::vector<long>> exponents)
      : basis_(std::move(basis)), lags_(std::move(lags)), exponents_(std::move(exponents)) {}

  const GeneratorBasis& basis() const { return basis_; }
  size_t q() const { return basis_.size(); }
  /// Distinct lags in canonical order, one exponent row each.
  const std::vector<LagExpr>& lags() const { return lags_; }
  const std::vector<std::vector<long>>& exponents() const { return exponents_; }

  std::vector<double> generator_values() const {
    std::vector<double> r;
    for (const auto& g : basis_) r.push_back(g.value);
    return r;
  }

  /// Exponent row of an arbitrary lag over this basis (it does not have to be
  /// one of the lags the basis was built from).
  std::vector<long> exponents_of(const LagExpr& lag) const {
    std::vector<long> row(basis_.size(), 0);
    size_t matched = 0;
    for (size_t j = 0; j < basis_.size(); ++j) {
      Rational c = lag.coefficient(basis_[j].label);
      if (c == 0) continue;
      ++matched;
      Rational m = c / basis_[j].rational_scale;
      if (m.get_den() != 1)
        throw Error(ErrorKind::kDecompositionError, "lag " + lag.str() + " is off the lattice");
      row[j] = m.get_num().get_si();
    }
    if (matched != lag.terms().size())
      throw Error(ErrorKind::kDecompositionError, "lag " + lag.str() + " uses a label outside the basis");
    return row;
  }

  LagExpr reconstruct(const std::vector<long>& row) const {
    LagExpr out;
    for (size_t j = 0; j < basis_.size(); ++j) out += Rational(row[j]) * basis_[j].as_lag();
    return out;
  }

  double lag_value(const std::vector<long>& row) const {
    double v = 0.0;
    for (size_t j = 0; j < basis_.size(); ++j) v += static_cast<double>(row[j]) * basis_[j].value;
    return v;
  }

  friend bool operator==(const DelayDecomposition& a, const DelayDecomposition& b) {
    return a.basis_ == b.basis_ && a.lags_ == b.lags_ && a.exponents_ == b.exponents_;
  }

 private:
  GeneratorBasis basis_;
  std::vector<LagExpr> lags_;
  std::vector<std::vector<long>> exponents_;
};

/// Canonical lattice: per label, r = value * gcd(numerators) / lcm(denominators)
/// over all coefficients on that label, so exponents are nonnegative integers
/// whose column gcd is 1.
inline DelayDecomposition build_lattice(const std::vector<LagExpr>& lags,
                                        const GeneratorTable& table = rational_generators()) {
  if (lags.empty()) throw Error(ErrorKind::kInvalidInput, "build_lattice needs at least one lag");
  std::map<std::string, std::pair<Integer, Integer>> num_gcd_den_lcm;
  for (const auto& lag : lags) {
    for (const auto& [label, c] : lag.terms()) {
      if (c < 0) throw Error(ErrorKind::kInvalidLag, "negative coefficient in " + lag.str());
      auto [it, inserted] = num_gcd_den_lcm.try_emplace(label, c.get_num(), c.get_den());
      if (!inserted) {
        it->second.first = gcd(it->second.first, c.get_num());
        it->second.second = lcm(it->second.second, c.get_den());
      }
    }
  }
  GeneratorBasis basis;
  for (const auto& [label, gl] : num_gcd_den_lcm) {
    Rational scale(gl.first, gl.second);
    scale.canonicalize();
    basis.push_back(Generator{label, scale, to_double(scale) * table.value(label)});
  }
  if (basis.empty()) basis.push_back(Generator{kUnitLabel, Rational(1), 1.0});

  std::vector<LagExpr> distinct = lags;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  DelayDecomposition shell(basis, {}, {});
  std::vector<std::vector<long>> rows;
  for (const auto& lag : distinct) rows.push_back(shell.exponents_of(lag));
  return DelayDecomposition(std::move(basis), std::move(distinct), std::move(rows));
}

/// Lattice covering every lag of every measure.
inline DelayDecomposition build_lattice(const std::vector<DiracSumMeasure>& measures,
                                        const GeneratorTable& table = rational_generators()) {
  std::vector<LagExpr> lags;
  for (const auto& m : measures)
    for (const auto& a : m.atoms()) lags.push_back(a.lag);
  if (lags.empty()) lags.push_back(LagExpr());
  return build_lattice(lags, table);
}

struct KroneckerResult {
  double beta = 0.0;
  std::vector<long> offsets;  // p_j
  double epsilon = 0.0;       // achieved max_j |beta r_j - gamma_j - p_j|
};

struct KroneckerOptions {
  double max_window = 1e7;  // search stops once |beta| would exceed this
};

/// Smallest-|beta| point of the grid beta = i * eps / (10 max r) with
/// |beta r_j - gamma_j - p_j| <= eps for all j (ties go to positive beta).
/// Only grid points that already satisfy the constraint of the largest
/// generator are visited; windows |beta| <= W double until a hit. A single
/// generator is solved exactly instead.
inline KroneckerResult kronecker_approximate(const std::vector<double>& generators,
                                             const std::vector<double>& targets, double epsilon,
                                             const KroneckerOptions& options = {}) {
  if (generators.empty() || generators.size() != targets.size())
    throw Error(ErrorKind::kInvalidInput, "generator/target size mismatch");
  if (!(epsilon > 0.0)) throw Error(ErrorKind::kInvalidInput, "epsilon must be positive");
  for (double r : generators)
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::kInvalidInput, "generators must be positive");
  for (double g : targets)
    if (!std::isfinite(g)) throw Error(ErrorKind::kInvalidInput, "targets must be finite");

  const size_t q = generators.size();
  if (q == 1) {
    // Exactly solvable: beta = (gamma + p) / r with the smallest |beta|, ties to positive.
    const double r = generators[0], g = targets[0];
    double p = std::nearbyint(-g);
    if (std::abs(g + p) == 0.5 && g + p < 0.0) p += 1.0;
    KroneckerResult out;
    out.beta = (g + p) / r;
    out.offsets = {static_cast<long>(p)};
    out.epsilon = std::abs(out.beta * r - g - p);
    return out;
  }
  const size_t pivot = static_cast<size_t>(
      std::max_element(generators.begin(), generators.end()) - generators.begin());
  const double r_star = generators[pivot];
  const double gamma_star = targets[pivot];
  const double step = epsilon / (10.0 * r_star);

  double best_eps = INFINITY;
  auto max_error = [&](double beta, std::vector<long>* offsets) {
    double err = 0.0;
    for (size_t j = 0; j < q; ++j) {
      double x = beta * generators[j] - targets[j];
      double p = std::nearbyint(x);
      err = std::max(err, std::abs(x - p));
      if (offsets) (*offsets)[j] = static_cast<long>(p);
    }
    return err;
  };

  // Visits grid indices with |beta| in (lo, hi] on one side (sign = +1 / -1).
  auto scan = [&](double lo, double hi, int sign, double& best_abs, long& best_index) {
    double b_min = sign > 0 ? lo : -hi;
    double b_max = sign > 0 ? hi : -lo;
    long p_first = static_cast<long>(std::floor(b_min * r_star - gamma_star - epsilon));
    long p_last = static_cast<long>(std::ceil(b_max * r_star - gamma_star + epsilon));
    for (long p = p_first; p <= p_last; ++p) {
      double a = (gamma_star + static_cast<double>(p) - epsilon) / r_star;
      double b = (gamma_star + static_cast<double>(p) + epsilon) / r_star;
      long i0 = static_cast<long>(std::ceil(std::max(a, b_min) / step));
      long i1 = static_cast<long>(std::floor(std::min(b, b_max) / step));
      for (long i = i0; i <= i1; ++i) {
        double beta = static_cast<double>(i) * step;
        double abs_beta = std::abs(beta);
        if (abs_beta <= lo && !(lo == 0.0 && i == 0)) continue;
        if (abs_beta > hi) continue;
        double err = max_error(beta, nullptr);
        best_eps = std::min(best_eps, err);
        if (err > epsilon) continue;
        bool better = abs_beta < best_abs || (abs_beta == best_abs && i > best_index);
        if (better) {
          best_abs = abs_beta;
          best_index = i;
        }
      }
    }
  };

  double prev = 0.0;
  for (double window = 1.0;; window *= 2.0) {
    double hi = std::min(window, options.max_window);
    double best_abs = INFINITY;
    long best_index = 0;
    scan(prev, hi, +1, best_abs, best_index);
    scan(prev, hi, -1, best_abs, best_index);
    if (std::isfinite(best_abs)) {
      KroneckerResult out;
      out.beta = static_cast<double>(best_index) * step;
      out.offsets.assign(q, 0);
      out.epsilon = max_error(out.beta, &out.offsets);
      return out;
    }
    if (hi >= options.max_window)
      throw Error(ErrorKind::kBudgetExceeded,
                  "no beta with |beta| <= " + std::to_string(options.max_window) +
                      " met the bound; best epsilon found " + std::to_string(best_eps));
    prev = hi;
  }
}

struct MonomialTerm {
  Rational weight;
  LagExpr lag;
  std::vector<long> exponents;
};

/// f(sigma + i tau) = sum_j h_j e^{sigma lambda_j} prod_k z_k^{m_jk}, z_k = e^{i tau r_k}.
inline std::vector<MonomialTerm> monomial_rep(const DiracSumMeasure& m, const DelayDecomposition& dec) {
  std::vector<MonomialTerm> out;
  for (const auto& a : m.atoms()) out.push_back(MonomialTerm{a.weight, a.lag, dec.exponents_of(a.lag)});
  return out;
}

/// For a one-generator lattice: P(x) = sum_j h_j x^{m_j}, x = e^{s r}.
inline RationalPolynomial univariate_polynomial(const DiracSumMeasure& m, const DelayDecomposition& dec) {
  if (dec.q() != 1) throw Error(ErrorKind::kUnsupportedCase, "univariate form needs a one-generator lattice");
  std::vector<Rational> coeffs;
  for (const auto& term : monomial_rep(m, dec)) {
    auto k = static_cast<size_t>(term.exponents[0]);
    if (coeffs.size() <= k) coeffs.resize(k + 1, Rational(0));
    coeffs[k] += term.weight;
  }
  return RationalPolynomial(std::move(coeffs));
}

/// Inverse of univariate_polynomial: sum_n c_n delta_{-n r}.
inline DiracSumMeasure lift_polynomial(const RationalPolynomial& p, const DelayDecomposition& dec) {
  if (dec.q() != 1) throw Error(ErrorKind::kUnsupportedCase, "lift needs a one-generator lattice");
  std::vector<Atom> atoms;
  const LagExpr r = dec.basis()[0].as_lag();
  for (size_t n = 0; n < p.coefficients().size(); ++n)
    atoms.push_back(Atom{Rational(static_cast<long>(n)) * r, p.coefficients()[n]});
  return normalize(std::move(atoms));
}

/// Precomputed floating form of a measure over a lattice, for scans.
struct TorusForm {
  std::vector<double> weights;
  std::vector<double> lags;
  std::vector<std::vector<long>> exponents;

  TorusForm() = default;
  TorusForm(const DiracSumMeasure& m, const DelayDecomposition& dec) {
    for (const auto& t : monomial_rep(m, dec)) {
      weights.push_back(to_double(t.weight));
      lags.push_back(dec.lag_value(t.exponents));
      exponents.push_back(t.exponents);
    }
  }

  /// sum_j h_j e^{sigma lambda_j} prod_k z_k^{m_jk}.
  std::complex<double> eval(double sigma, const std::vector<std::complex<double>>& z) const {
    std::complex<double> acc = 0.0;
    for (size_t j = 0; j < weights.size(); ++j) {
      std::complex<double> mono = weights[j] * std::exp(sigma * lags[j]);
      for (size_t k = 0; k < z.size(); ++k)
        for (long e = 0; e < exponents[j][k]; ++e) mono *= z[k];
      acc += mono;
    }
    return acc;
  }
};

/// Generalized character evaluation
/// sum_j h_j e^{sigma lambda_j} exp(2 pi i sum_k m_jk gamma_k), phases in cycles.
inline std::complex<double> char_eval(const DiracSumMeasure& m, double sigma, const std::vector<double>& phases,
                                      const DelayDecomposition& dec) {
  if (phases.size() != dec.q()) throw Error(ErrorKind::kInvalidInput, "one phase per generator required");
  std::complex<double> acc = 0.0;
  for (const auto& t : monomial_rep(m, dec)) {
    double cycles = 0.0;
    for (size_t k = 0; k < phases.size(); ++k) cycles += static_cast<double>(t.exponents[k]) * phases[k];
    acc += to_double(t.weight) * std::exp(sigma * dec.lag_value(t.exponents)) *
           std::polar(1.0, 2.0 * std::numbers::pi * cycles);
  }
  return acc;
}

}  // namespace lcdde
