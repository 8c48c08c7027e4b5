#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "lcdde/error.hpp"
#include "lcdde/lattice.hpp"
#include "lcdde/measure.hpp"
#include "lcdde/polynomial.hpp"
#include "lcdde/scan.hpp"

namespace lcdde {

/// f_1..f_K together with a lattice that covers all of their lags.
class CoronaInstance {
 public:
  CoronaInstance(std::vector<DiracSumMeasure> measures, const GeneratorTable& table = rational_generators())
      : measures_(std::move(measures)) {
    if (measures_.empty()) throw Error(ErrorKind::kInvalidInput, "corona instance needs K >= 1 measures");
    if (std::all_of(measures_.begin(), measures_.end(), [](const auto& m) { return m.is_zero(); }))
      throw Error(ErrorKind::kInvalidInput, "all measures are zero");
    decomposition_ = build_lattice(measures_, table);
    for (const auto& m : measures_) forms_.emplace_back(m, decomposition_);
  }

  const std::vector<DiracSumMeasure>& measures() const { return measures_; }
  const DelayDecomposition& decomposition() const { return decomposition_; }
  size_t q() const { return decomposition_.q(); }
  const std::vector<TorusForm>& torus_forms() const { return forms_; }

  /// G(sigma, z) = sum_k |f_k(sigma, z)|.
  double objective(double sigma, const std::vector<std::complex<double>>& z) const {
    double g = 0.0;
    for (const auto& f : forms_) g += std::abs(f.eval(sigma, z));
    return g;
  }

  /// sum_k |f_k(s)| at an actual complex frequency.
  double sum_abs_laplace(std::complex<double> s) const {
    double g = 0.0;
    for (const auto& f : forms_) {
      std::complex<double> acc = 0.0;
      for (size_t j = 0; j < f.weights.size(); ++j) acc += f.weights[j] * std::exp(s * f.lags[j]);
      g += std::abs(acc);
    }
    return g;
  }

  /// Limit of sum_k |f_k(s)| as Re s -> -infinity: the lag-0 weights.
  double minus_infinity_limit() const {
    double v = 0.0;
    for (const auto& m : measures_) v += std::abs(to_double(m.weight_at_zero()));
    return v;
  }

  double max_tv_norm() const {
    double v = 0.0;
    for (const auto& m : measures_) v = std::max(v, to_double(tv_norm(m)));
    return v;
  }

 private:
  std::vector<DiracSumMeasure> measures_;
  DelayDecomposition decomposition_;
  std::vector<TorusForm> forms_;
};

enum class CoronaVerdict { kHolds, kFails, kInconclusive };

inline std::string_view to_string(CoronaVerdict v) {
  switch (v) {
    case CoronaVerdict::kHolds: return "holds";
    case CoronaVerdict::kFails: return "fails";
    case CoronaVerdict::kInconclusive: return "inconclusive";
  }
  return "?";
}

/// Where the scan minimum sits: either the symbolic Re s = -infinity endpoint
/// or (sigma, phases) with phases in cycles, one per generator.
struct CoronaWitness {
  bool at_minus_infinity = false;
  double sigma = 0.0;
  std::vector<double> phases;

  /// For one-generator lattices the torus point is an actual frequency.
  std::optional<std::complex<double>> frequency(const DelayDecomposition& dec) const {
    if (at_minus_infinity || dec.q() != 1) return std::nullopt;
    return std::complex<double>(sigma, 2.0 * std::numbers::pi * phases[0] / dec.basis()[0].value);
  }
};

struct CoronaEstimate {
  double alpha_hat = 0.0;
  CoronaWitness witness;
  double grid_min = 0.0;
  double minus_infinity_value = 0.0;
};

/// S = max(5, ln(1 + sum_k tv(f_k)) / min_j r_j).
inline SigmaWindow default_corona_window(const CoronaInstance& inst) {
  double tv = 0.0;
  for (const auto& m : inst.measures()) tv += to_double(tv_norm(m));
  auto r = inst.decomposition().generator_values();
  double r_min = *std::min_element(r.begin(), r.end());
  double s = std::max(5.0, std::log1p(tv) / r_min);
  return {-s, s};
}

/// Estimates inf_s sum_k |f_k(s)| over the sigma window times the torus,
/// including the Re s -> -infinity limit.
inline CoronaEstimate corona_inf_estimate(const CoronaInstance& inst, const SigmaWindow& window,
                                          const ScanGrid& grid, std::vector<ScanRow>* rows = nullptr) {
  const size_t q = inst.q();
  auto objective = [&](double sigma, const std::vector<double>& angles) {
    return inst.objective(sigma, torus_point(angles));
  };
  ScanResult scan = scan_sigma_torus(objective, q, window, grid, rows);
  CoronaEstimate out;
  out.grid_min = scan.grid_min;
  out.minus_infinity_value = inst.minus_infinity_limit();
  if (out.minus_infinity_value < scan.refined_min) {
    out.alpha_hat = out.minus_infinity_value;
    out.witness.at_minus_infinity = true;
  } else {
    out.alpha_hat = scan.refined_min;
    out.witness.sigma = scan.refined_argmin.sigma;
    for (double a : scan.refined_argmin.angles) {
      double cycles = a / (2.0 * std::numbers::pi);
      out.witness.phases.push_back(cycles < 0.0 ? cycles + 1.0 : cycles);
    }
  }
  return out;
}

struct CommensurableDecision {
  CoronaVerdict verdict = CoronaVerdict::kInconclusive;
  std::vector<RationalPolynomial> polynomials;  // P_k(x), x = e^{s r}
  RationalPolynomial gcd;
};

/// Exact decision for one-generator lattices: the corona condition holds iff
/// gcd(P_1, ..., P_K) over Q is a nonzero constant.
inline CommensurableDecision corona_decide_commensurable(const CoronaInstance& inst) {
  if (inst.q() != 1) throw Error(ErrorKind::kUnsupportedCase, "exact decision needs commensurable lags (q = 1)");
  CommensurableDecision out;
  for (const auto& m : inst.measures()) out.polynomials.push_back(univariate_polynomial(m, inst.decomposition()));
  out.gcd = polynomial_gcd(out.polynomials);
  out.verdict = out.gcd.is_nonzero_constant() ? CoronaVerdict::kHolds : CoronaVerdict::kFails;
  return out;
}

struct CertificateEntry {
  double epsilon = 0.0;
  std::complex<double> s;
  double value = 0.0;           // sum_k |f_k(s)|
  std::vector<double> per_measure;  // |f_k(s)|
  double bound = 0.0;           // C * C~ * epsilon
  double beta = 0.0;
  double kronecker_epsilon = 0.0;
};

struct ViolationCertificate {
  double sigma = 0.0;
  std::vector<double> phases;
  bool lag_zero = false;   // the common zero is the Re s -> -infinity homomorphism
  double constant_c = 0.0;        // 2 pi max_{k,l} sum_j m_{k,l,j}
  double constant_c_tilde = 0.0;  // max_k sum_l |f_{k,l}| e^{sigma lambda_{k,l}}
  double character_residual = 0.0;  // max_k |char_eval(f_k)|
  std::vector<CertificateEntry> entries;
};

struct CertifyOptions {
  double zero_tolerance = 1e-10;  // relative to 1 + C~
  KroneckerOptions kronecker;
};

/// Vanishing sequence from a common generalized character zero: for each eps,
/// beta from Kronecker approximation of the phases and s = sigma + 2 pi i beta.
inline ViolationCertificate certify_violation(const CoronaInstance& inst, double sigma,
                                              const std::vector<double>& phases,
                                              const std::vector<double>& epsilons,
                                              const CertifyOptions& options = {}) {
  const auto& dec = inst.decomposition();
  if (phases.size() != dec.q()) throw Error(ErrorKind::kInvalidInput, "one phase per generator required");
  ViolationCertificate cert;
  cert.sigma = sigma;
  cert.phases = phases;
  long max_exponent_sum = 0;
  for (const auto& m : inst.measures()) {
    double c_tilde_k = 0.0;
    for (const auto& t : monomial_rep(m, dec)) {
      long sum = 0;
      for (long e : t.exponents) sum += e;
      max_exponent_sum = std::max(max_exponent_sum, sum);
      c_tilde_k += std::abs(to_double(t.weight)) * std::exp(sigma * dec.lag_value(t.exponents));
    }
    cert.constant_c_tilde = std::max(cert.constant_c_tilde, c_tilde_k);
    cert.character_residual = std::max(cert.character_residual, std::abs(char_eval(m, sigma, phases, dec)));
  }
  cert.constant_c = 2.0 * std::numbers::pi * static_cast<double>(max_exponent_sum);
  if (cert.character_residual > options.zero_tolerance * (1.0 + cert.constant_c_tilde))
    throw Error(ErrorKind::kNotACommonZero,
                "max_k |phi(f_k)| = " + std::to_string(cert.character_residual) + " at the given character");
  const auto r = dec.generator_values();
  for (double eps : epsilons) {
    KroneckerResult kr = kronecker_approximate(r, phases, eps, options.kronecker);
    CertificateEntry e;
    e.epsilon = eps;
    e.beta = kr.beta;
    e.kronecker_epsilon = kr.epsilon;
    e.s = {sigma, 2.0 * std::numbers::pi * kr.beta};
    for (const auto& f : inst.torus_forms()) {
      std::complex<double> acc = 0.0;
      for (size_t j = 0; j < f.weights.size(); ++j) acc += f.weights[j] * std::exp(e.s * f.lags[j]);
      e.per_measure.push_back(std::abs(acc));
      e.value += std::abs(acc);
    }
    e.bound = cert.constant_c * cert.constant_c_tilde * eps;
    cert.entries.push_back(std::move(e));
  }
  return cert;
}

/// Certificate for a common zero of the lag-0 homomorphism (no f_k has an
/// atom at lag 0): real s = ln(eps) / lambda_min drives every transform to 0,
/// with sum_k |f_k(s)| <= K * C~ * eps for eps < 1.
inline ViolationCertificate certify_lag_zero_violation(const CoronaInstance& inst,
                                                       const std::vector<double>& epsilons) {
  if (inst.minus_infinity_limit() != 0.0)
    throw Error(ErrorKind::kNotACommonZero, "some measure has a nonzero atom at lag 0");
  ViolationCertificate cert;
  cert.lag_zero = true;
  double lambda_min = std::numeric_limits<double>::infinity();
  for (const auto& f : inst.torus_forms()) {
    double c_tilde_k = 0.0;
    for (size_t j = 0; j < f.weights.size(); ++j) {
      lambda_min = std::min(lambda_min, f.lags[j]);
      c_tilde_k += std::abs(f.weights[j]);
    }
    cert.constant_c_tilde = std::max(cert.constant_c_tilde, c_tilde_k);
  }
  cert.constant_c = static_cast<double>(inst.measures().size());
  for (double eps : epsilons) {
    if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::kInvalidInput, "epsilons must lie in (0, 1)");
    CertificateEntry e;
    e.epsilon = eps;
    e.s = {std::log(eps) / lambda_min, 0.0};
    for (const auto& f : inst.torus_forms()) {
      double acc = 0.0;
      for (size_t j = 0; j < f.weights.size(); ++j) acc += f.weights[j] * std::exp(e.s.real() * f.lags[j]);
      e.per_measure.push_back(std::abs(acc));
      e.value += std::abs(acc);
    }
    e.bound = cert.constant_c * cert.constant_c_tilde * eps;
    cert.entries.push_back(std::move(e));
  }
  return cert;
}

struct CommonZero {
  bool lag_zero = false;  // x = 0, i.e. Re s -> -infinity
  double sigma = 0.0;
  double phase = 0.0;     // cycles
  std::complex<double> root;
};

/// A common zero x0 of a nonconstant gcd, mapped back to (sigma, phase) via
/// x = e^{s r}. Prefers x = 0 when the gcd vanishes there; otherwise the root
/// closest to the unit circle, Newton-polished on the gcd.
inline CommonZero common_zero_of_gcd(const RationalPolynomial& g, const DelayDecomposition& dec) {
  if (g.degree() < 1) throw Error(ErrorKind::kInvalidInput, "gcd is constant; no common zero");
  CommonZero out;
  if (g.coefficient(0) == 0) {
    out.lag_zero = true;
    return out;
  }
  const RationalPolynomial monic = g.monic();
  const long n = monic.degree();
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (long i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (long i = 0; i < n; ++i) companion(i, n - 1) = -to_double(monic.coefficient(static_cast<size_t>(i)));
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion.cast<std::complex<double>>());
  auto roots = solver.eigenvalues();
  long pick = 0;
  for (long i = 1; i < roots.size(); ++i) {
    double a = std::abs(std::log(std::abs(roots(i)))), b = std::abs(std::log(std::abs(roots(pick))));
    if (a < b - 1e-12 || (std::abs(a - b) <= 1e-12 && roots(i).imag() > roots(pick).imag())) pick = i;
  }
  std::complex<double> x = roots(pick);
  RationalPolynomial derivative;
  {
    std::vector<Rational> d;
    for (size_t k = 1; k < monic.coefficients().size(); ++k) d.push_back(Rational(static_cast<long>(k)) * monic.coefficients()[k]);
    derivative = RationalPolynomial(std::move(d));
  }
  for (int it = 0; it < 50; ++it) {
    std::complex<double> d = derivative.eval(x);
    if (std::abs(d) == 0.0) break;
    std::complex<double> step = monic.eval(x) / d;
    x -= step;
    if (std::abs(step) <= 1e-17 * std::abs(x)) break;
  }
  const double r = dec.basis()[0].value;
  out.root = x;
  out.sigma = std::log(std::abs(x)) / r;
  double cycles = std::arg(x) / (2.0 * std::numbers::pi);
  out.phase = cycles < 0.0 ? cycles + 1.0 : cycles;
  return out;
}

struct CoronaReport {
  CoronaVerdict verdict = CoronaVerdict::kInconclusive;
  bool exact = false;  // verdict comes from the exact commensurable path
  CoronaEstimate estimate;
  double decision_threshold = 0.0;
  std::optional<CommensurableDecision> decision;
  std::optional<ViolationCertificate> certificate;
};

inline std::vector<double> default_certificate_epsilons() { return {1e-1, 1e-2, 1e-3, 1e-4}; }

/// Full corona analysis: scan estimate always; exact gcd decision and a
/// constructive certificate when lags are commensurable. Scans alone only
/// ever return holds or inconclusive.
inline CoronaReport corona_analyze(const CoronaInstance& inst, const SigmaWindow& window, const ScanGrid& grid,
                                   std::vector<ScanRow>* rows = nullptr) {
  CoronaReport report;
  report.estimate = corona_inf_estimate(inst, window, grid, rows);
  report.decision_threshold = 1e-2 * inst.max_tv_norm();
  report.verdict = report.estimate.alpha_hat > report.decision_threshold ? CoronaVerdict::kHolds
                                                                          : CoronaVerdict::kInconclusive;
  if (inst.q() == 1) {
    report.exact = true;
    report.decision = corona_decide_commensurable(inst);
    report.verdict = report.decision->verdict;
    if (report.verdict == CoronaVerdict::kFails) {
      CommonZero zero = common_zero_of_gcd(report.decision->gcd, inst.decomposition());
      report.certificate = zero.lag_zero
                               ? certify_lag_zero_violation(inst, default_certificate_epsilons())
                               : certify_violation(inst, zero.sigma, {zero.phase}, default_certificate_epsilons());
    }
  }
  return report;
}

}  // namespace lcdde
