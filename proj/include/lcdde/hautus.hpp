#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string_view>
#include <vector>

#include "lcdde/error.hpp"
#include "lcdde/lattice.hpp"
#include "lcdde/scan.hpp"
#include "lcdde/system.hpp"

namespace lcdde {

enum class Verdict { kPass, kFail, kInconclusive };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kInconclusive: return "inconclusive";
  }
  return "?";
}

inline double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

template <typename Matrix>
double smallest_singular_value(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  return sv.size() == 0 ? 0.0 : sv(sv.size() - 1);
}

/// H(s) = I_d - sum_j e^{-s Lambda_j} A_j.
inline Eigen::MatrixXcd h_eval(const SystemSpec& spec, std::complex<double> s) {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Identity(spec.d, spec.d);
  for (size_t j = 0; j < spec.n_delays(); ++j)
    h -= std::exp(-s * spec.delay_value(j)) * spec.a[j].to_double().cast<std::complex<double>>();
  return h;
}

struct RankCheck {
  Verdict verdict = Verdict::kFail;
  size_t rank = 0;
  double sigma_min = 0.0;
};

/// Numerical rank of [A_N, B] with threshold 1e-10 * sigma_max.
inline RankCheck cond_ii_check(const SystemSpec& spec) {
  Eigen::MatrixXd m(spec.d, spec.d + spec.m);
  m << spec.a.back().to_double(), spec.b.to_double();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  RankCheck out;
  const double threshold = 1e-10 * (sv.size() ? sv(0) : 0.0);
  for (long i = 0; i < sv.size(); ++i)
    if (sv(i) > threshold && sv(i) > 0.0) ++out.rank;
  out.sigma_min = sv.size() ? sv(sv.size() - 1) : 0.0;
  out.verdict = out.rank == spec.d ? Verdict::kPass : Verdict::kFail;
  return out;
}

struct HautusThresholds {
  double fail_scale = 1e-8;  // confirmed drop: sigma_min < fail_scale * (1 + max_j ||A_j||)
  double pass_scale = 1e-4;  // pass: sigma_min > pass_scale * (1 + ||B||)
};

/// Torus-completed family H(sigma, z) = I - sum_j A_j e^{-sigma Lambda_j} prod_k z_k^{m_jk}.
class HautusFamily {
 public:
  explicit HautusFamily(const SystemSpec& spec) : spec_(spec), lattice_(spec.delay_lattice()) {
    for (const auto& aj : spec.a) a_.push_back(aj.to_double().cast<std::complex<double>>());
    b_ = spec.b.to_double().cast<std::complex<double>>();
    for (const auto& lag : spec.delays) {
      rows_.push_back(lattice_.exponents_of(lag));
      lags_.push_back(lattice_.lag_value(rows_.back()));
    }
  }

  const DelayDecomposition& lattice() const { return lattice_; }

  Eigen::MatrixXcd h(double sigma, const std::vector<std::complex<double>>& z) const {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(spec_.d, spec_.d);
    for (size_t j = 0; j < a_.size(); ++j) {
      std::complex<double> coeff = std::exp(-sigma * lags_[j]);
      for (size_t k = 0; k < z.size(); ++k)
        for (long e = 0; e < rows_[j][k]; ++e) coeff *= z[k];
      out -= coeff * a_[j];
    }
    return out;
  }

  double sigma_min(double sigma, const std::vector<std::complex<double>>& z) const {
    Eigen::MatrixXcd m(spec_.d, spec_.d + spec_.m);
    m << h(sigma, z), b_;
    return smallest_singular_value(m);
  }

 private:
  const SystemSpec& spec_;
  DelayDecomposition lattice_;
  std::vector<Eigen::MatrixXcd> a_;
  Eigen::MatrixXcd b_;
  std::vector<std::vector<long>> rows_;
  std::vector<double> lags_;
};

struct CondIResult {
  Verdict verdict = Verdict::kInconclusive;
  double min_sigma_min = 0.0;
  double grid_min = 0.0;
  double argmin_sigma = 0.0;
  std::vector<double> argmin_phases;  // cycles
  double plus_infinity_sigma_min = 0.0;   // sigma_min([I, B])
  double minus_infinity_sigma_min = 0.0;  // sigma_min([A_N, B]) of the renormalized limit
  bool plus_infinity_pass = false;
  bool minus_infinity_pass = false;
  double fail_threshold = 0.0;
  double pass_threshold = 0.0;
};

/// S = ln(1 + 2 sum_j ||A_j||) / Lambda_1 + 2.
inline SigmaWindow default_hautus_window(const SystemSpec& spec) {
  double norm_sum = 0.0;
  for (const auto& aj : spec.a_double()) norm_sum += spectral_norm(aj);
  double s = std::log1p(2.0 * norm_sum) / spec.delay_value(0) + 2.0;
  return {-s, s};
}

inline ScanGrid default_hautus_grid() {
  ScanGrid g;
  g.refine_passes = 2;
  return g;
}

/// Minimizes sigma_min([H(sigma, z), B]) over the window times the torus and
/// checks the two renormalized endpoints (I at +infinity, A_N at -infinity).
inline CondIResult cond_i_scan(const SystemSpec& spec, const SigmaWindow& window, const ScanGrid& grid,
                               const HautusThresholds& thresholds = {}, std::vector<ScanRow>* rows = nullptr) {
  spec.validate();
  HautusFamily family(spec);
  const size_t q = family.lattice().q();
  auto objective = [&](double sigma, const std::vector<double>& angles) {
    return family.sigma_min(sigma, torus_point(angles));
  };
  ScanResult scan = scan_sigma_torus(objective, q, window, grid, rows);

  double max_a = 0.0;
  for (const auto& aj : spec.a_double()) max_a = std::max(max_a, spectral_norm(aj));
  const Eigen::MatrixXd b = spec.b.to_double();

  CondIResult out;
  out.fail_threshold = thresholds.fail_scale * (1.0 + max_a);
  out.pass_threshold = thresholds.pass_scale * (1.0 + spectral_norm(b));
  out.grid_min = scan.grid_min;
  out.min_sigma_min = scan.refined_min;
  out.argmin_sigma = scan.refined_argmin.sigma;
  for (double a : scan.refined_argmin.angles) {
    double cycles = a / (2.0 * std::numbers::pi);
    out.argmin_phases.push_back(cycles < 0.0 ? cycles + 1.0 : cycles);
  }

  Eigen::MatrixXd plus(spec.d, spec.d + spec.m), minus(spec.d, spec.d + spec.m);
  plus << Eigen::MatrixXd::Identity(spec.d, spec.d), b;
  minus << spec.a.back().to_double(), b;
  out.plus_infinity_sigma_min = smallest_singular_value(plus);
  out.minus_infinity_sigma_min = smallest_singular_value(minus);
  out.plus_infinity_pass = out.plus_infinity_sigma_min > out.pass_threshold;
  out.minus_infinity_pass = cond_ii_check(spec).verdict == Verdict::kPass;

  if (out.min_sigma_min < out.fail_threshold) {
    out.verdict = Verdict::kFail;
  } else if (out.min_sigma_min > out.pass_threshold && out.plus_infinity_pass && out.minus_infinity_pass) {
    out.verdict = Verdict::kPass;
  } else {
    out.verdict = Verdict::kInconclusive;
  }
  return out;
}

struct HautusReport {
  CondIResult cond_i;
  RankCheck cond_ii;
  Verdict overall = Verdict::kInconclusive;
  SigmaWindow window;
};

inline Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::kFail || b == Verdict::kFail) return Verdict::kFail;
  if (a == Verdict::kPass && b == Verdict::kPass) return Verdict::kPass;
  return Verdict::kInconclusive;
}

inline HautusReport hautus_decide(const SystemSpec& spec, const SigmaWindow& window, const ScanGrid& grid,
                                  const HautusThresholds& thresholds = {}, std::vector<ScanRow>* rows = nullptr) {
  HautusReport report;
  report.window = window;
  report.cond_i = cond_i_scan(spec, window, grid, thresholds, rows);
  report.cond_ii = cond_ii_check(spec);
  report.overall = combine(report.cond_i.verdict, report.cond_ii.verdict);
  return report;
}

inline HautusReport hautus_decide(const SystemSpec& spec) {
  spec.validate();
  return hautus_decide(spec, default_hautus_window(spec), default_hautus_grid());
}

}  // namespace lcdde
