#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "lcdde/error.hpp"
#include "lcdde/exact_linalg.hpp"
#include "lcdde/lag.hpp"
#include "lcdde/lattice.hpp"

namespace lcdde {

/// x(t) = sum_j A_j x(t - Lambda_j) + B u(t) with 0 < Lambda_1 < ... < Lambda_N.
struct SystemSpec {
  size_t d = 0;
  size_t m = 0;
  std::vector<LagExpr> delays;
  std::vector<RationalMatrix> a;
  RationalMatrix b;
  GeneratorTable generators;

  size_t n_delays() const { return delays.size(); }

  double delay_value(size_t j) const { return delays.at(j).value(generators); }

  std::vector<Eigen::MatrixXd> a_double() const {
    std::vector<Eigen::MatrixXd> out;
    for (const auto& aj : a) out.push_back(aj.to_double());
    return out;
  }

  DelayDecomposition delay_lattice() const { return build_lattice(delays, generators); }

  /// Field-level problems; empty when the spec is consistent.
  std::vector<std::string> validation_errors() const {
    std::vector<std::string> errs;
    if (d == 0) errs.push_back("system.d: must be positive");
    if (m == 0) errs.push_back("system.m: must be positive");
    if (delays.empty()) errs.push_back("system.delays: at least one delay required");
    if (a.size() != delays.size()) errs.push_back("system.A: expected one matrix per delay");
    for (size_t j = 0; j < a.size(); ++j)
      if (a[j].rows() != d || a[j].cols() != d)
        errs.push_back("system.A[" + std::to_string(j) + "]: expected " + std::to_string(d) + "x" +
                       std::to_string(d));
    if (b.rows() != d || b.cols() != m)
      errs.push_back("system.B: expected " + std::to_string(d) + "x" + std::to_string(m));
    double prev = 0.0;
    for (size_t j = 0; j < delays.size(); ++j) {
      double v = 0.0;
      try {
        v = delays[j].value(generators);
      } catch (const Error& e) {
        errs.push_back("system.delays[" + std::to_string(j) + "]: " + e.what());
        continue;
      }
      if (j == 0 && !(v > 0.0)) errs.push_back("system.delays[0]: must be positive");
      if (j > 0 && !(v > prev)) errs.push_back("system.delays[" + std::to_string(j) + "]: delays must be strictly increasing");
      prev = v;
    }
    return errs;
  }

  void validate() const {
    auto errs = validation_errors();
    if (errs.empty()) return;
    std::string msg;
    for (const auto& e : errs) msg += (msg.empty() ? "" : "; ") + e;
    throw Error(ErrorKind::kInvalidInput, msg);
  }
};

}  // namespace lcdde
