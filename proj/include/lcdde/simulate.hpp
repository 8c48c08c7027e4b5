#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "lcdde/error.hpp"
#include "lcdde/exact_linalg.hpp"
#include "lcdde/hautus.hpp"
#include "lcdde/measure.hpp"
#include "lcdde/rational.hpp"
#include "lcdde/system.hpp"

namespace lcdde {

using RationalFunction = PiecewiseConstant<Rational>;

/// Common step rho of commensurable delays: the largest rational with every
/// Lambda_j an integer multiple of it.
inline Rational commensurable_step(const SystemSpec& spec) {
  for (const auto& lag : spec.delays)
    if (!lag.is_rational())
      throw Error(ErrorKind::kUnsupportedMesh, "delay " + lag.str() + " is not rational; no common mesh");
  DelayDecomposition dec = build_lattice(spec.delays, spec.generators);
  return dec.basis()[0].rational_scale;
}

/// Delay of index j in mesh cells; throws unless it is an integer multiple of rho.
inline long delay_cells(const SystemSpec& spec, size_t j, const Rational& rho) {
  const LagExpr& lag = spec.delays.at(j);
  if (!lag.is_rational()) throw Error(ErrorKind::kUnsupportedMesh, "delay " + lag.str() + " is not rational");
  Rational n = lag.rational_value() / rho;
  if (n.get_den() != 1)
    throw Error(ErrorKind::kUnsupportedMesh, "delay " + lag.str() + " is not a multiple of the mesh step");
  return n.get_num().get_si();
}

/// Method-of-steps solution on mesh rho: state cells over [-Lambda_N, t~),
/// control cells over [0, t~).
struct Trajectory {
  Rational mesh_step;
  RationalFunction x;
  RationalFunction u;
};

/// Exact cellwise recursion x_k = sum_j A_j x_{k - n_j} + B u_k.
inline Trajectory simulate(const SystemSpec& spec, const RationalFunction& x0, const RationalFunction& u) {
  spec.validate();
  const Rational rho = x0.mesh_step();
  if (u.mesh_step() != rho) throw Error(ErrorKind::kMeshMismatch, "x0 and u use different mesh steps");
  std::vector<long> shifts;
  for (size_t j = 0; j < spec.n_delays(); ++j) shifts.push_back(delay_cells(spec, j, rho));
  const long window = shifts.back();
  if (x0.start_cell() != -window || static_cast<long>(x0.cell_count()) != window || x0.dim() != spec.d)
    throw Error(ErrorKind::kInvalidInput, "x0 must cover [-Lambda_N, 0) with d components");
  if (u.start_cell() != 0 || u.dim() != spec.m)
    throw Error(ErrorKind::kInvalidInput, "u must start at t = 0 with m components");

  const long horizon = static_cast<long>(u.cell_count());
  Trajectory out{rho, RationalFunction(rho, -window, spec.d, static_cast<size_t>(window + horizon)), u};
  for (long k = -window; k < 0; ++k) out.x.cell(static_cast<size_t>(k + window)) = x0.at_cell(k);
  for (long k = 0; k < horizon; ++k) {
    std::vector<Rational> next = spec.b * u.at_cell(k);
    for (size_t j = 0; j < shifts.size(); ++j) {
      const auto& prev = out.x.cell(static_cast<size_t>(k - shifts[j] + window));
      auto contrib = spec.a[j] * prev;
      for (size_t c = 0; c < spec.d; ++c) next[c] += contrib[c];
    }
    out.x.cell(static_cast<size_t>(k + window)) = std::move(next);
  }
  return out;
}

/// State cells x(T + theta), theta in [-Lambda_N, 0), stacked cell by cell.
inline std::vector<Rational> terminal_window(const Trajectory& traj, long window_cells) {
  std::vector<Rational> out;
  const long end = traj.x.end_cell();
  for (long k = end - window_cells; k < end; ++k) {
    auto cell = traj.x.at_cell(k);
    out.insert(out.end(), cell.begin(), cell.end());
  }
  return out;
}

inline std::vector<Rational> stack(const RationalFunction& f) {
  std::vector<Rational> out;
  for (size_t i = 0; i < f.cell_count(); ++i) out.insert(out.end(), f.cell(i).begin(), f.cell(i).end());
  return out;
}

inline RationalFunction unstack(const std::vector<Rational>& v, const Rational& rho, long start_cell, size_t dim) {
  RationalFunction f(rho, start_cell, dim, v.size() / dim);
  for (size_t i = 0; i < f.cell_count(); ++i)
    for (size_t c = 0; c < dim; ++c) f.cell(i)[c] = v[i * dim + c];
  return f;
}

/// Linear map from stacked control cells on [0, T) to the stacked terminal
/// window, plus the free response from the stacked initial cells.
struct ReachabilityOperator {
  Rational mesh_step;
  long horizon_cells = 0;
  long window_cells = 0;
  RationalMatrix control_map;    // (window_cells * d) x (horizon_cells * m)
  RationalMatrix free_response;  // (window_cells * d) x (window_cells * d)

  size_t rank() const { return exact_rank(control_map); }
  bool surjective() const { return rank() == control_map.rows(); }
};

/// Horizon T must be a multiple of rho; the default horizon is d * Lambda_N.
inline ReachabilityOperator build_reachability(const SystemSpec& spec, std::optional<Rational> horizon = std::nullopt,
                                               std::optional<Rational> mesh_step = std::nullopt) {
  spec.validate();
  const Rational rho = mesh_step.value_or(commensurable_step(spec));
  const long window = delay_cells(spec, spec.n_delays() - 1, rho);
  const Rational t_final = horizon.value_or(Rational(static_cast<long>(spec.d)) * spec.delays.back().rational_value());
  Rational cells = t_final / rho;
  if (cells.get_den() != 1 || cells < 0) throw Error(ErrorKind::kMeshMismatch, "horizon is not a multiple of the mesh step");
  const long k_cells = cells.get_num().get_si();

  ReachabilityOperator op;
  op.mesh_step = rho;
  op.horizon_cells = k_cells;
  op.window_cells = window;
  const size_t n_rows = static_cast<size_t>(window) * spec.d;
  op.control_map = RationalMatrix(n_rows, static_cast<size_t>(k_cells) * spec.m);
  op.free_response = RationalMatrix(n_rows, n_rows);

  const RationalFunction zero_x0(rho, -window, spec.d, static_cast<size_t>(window));
  const RationalFunction zero_u(rho, 0, spec.m, static_cast<size_t>(k_cells));
  for (size_t col = 0; col < op.control_map.cols(); ++col) {
    RationalFunction u = zero_u;
    u.cell(col / spec.m)[col % spec.m] = 1;
    auto w = terminal_window(simulate(spec, zero_x0, u), window);
    for (size_t r = 0; r < n_rows; ++r) op.control_map(r, col) = w[r];
  }
  for (size_t col = 0; col < n_rows; ++col) {
    RationalFunction x0 = zero_x0;
    x0.cell(col / spec.d)[col % spec.d] = 1;
    auto w = terminal_window(simulate(spec, x0, zero_u), window);
    for (size_t r = 0; r < n_rows; ++r) op.free_response(r, col) = w[r];
  }
  return op;
}

struct SteerResult {
  std::optional<RationalFunction> control;
  std::optional<std::vector<Rational>> unreachable_certificate;  // w with w^T R = 0, w . (phi - free) != 0
};

/// Minimum-norm control with x(T + theta) = phi(theta) on the terminal window.
inline SteerResult steer(const SystemSpec& spec, const ReachabilityOperator& op, const RationalFunction& x0,
                         const RationalFunction& target) {
  if (x0.mesh_step() != op.mesh_step || target.mesh_step() != op.mesh_step)
    throw Error(ErrorKind::kInvalidInput, "x0 / target mesh does not match the operator");
  if (x0.dim() != spec.d || target.dim() != spec.d || static_cast<long>(x0.cell_count()) != op.window_cells ||
      static_cast<long>(target.cell_count()) != op.window_cells)
    throw Error(ErrorKind::kInvalidInput, "x0 and target must have Lambda_N / rho cells of dimension d");
  std::vector<Rational> rhs = stack(target);
  auto free = op.free_response * stack(x0);
  for (size_t i = 0; i < rhs.size(); ++i) rhs[i] -= free[i];
  ExactSolve sol = solve_min_norm(op.control_map, rhs);
  SteerResult out;
  if (sol.solution) out.control = unstack(*sol.solution, op.mesh_step, 0, spec.m);
  out.unreachable_certificate = std::move(sol.left_null_certificate);
  return out;
}

struct FrequencySample {
  std::complex<double> s;
  double residual = 0.0;  // ||H(s) X_T(s) - B U_T(s)||
  double tail_bound = 0.0;
  double rounding_slack = 0.0;
};

struct FrequencyCheck {
  double alpha0 = 0.0;  // growth abscissa of the tail bound
  double max_residual = 0.0;
  std::vector<FrequencySample> samples;
  bool within_bound() const {
    return std::all_of(samples.begin(), samples.end(),
                       [](const auto& s) { return s.residual <= s.tail_bound + s.rounding_slack; });
  }
};

/// Growth abscissa of the tail bound: 0 when a = sum ||A_j|| <= 1, ln(a) / rho otherwise.
inline double frequency_alpha0(const SystemSpec& spec, const Rational& rho) {
  double a = 0.0;
  for (const auto& aj : spec.a_double()) a += spectral_norm(aj);
  return a <= 1.0 ? 0.0 : std::log(a) / to_double(rho);
}

/// Compares H(s) X_T(s) with B U_T(s) for a zero-initial trajectory driven by
/// u supported in [0, T). The mismatch is -H(s) times the transform of the
/// state after T, bounded in closed form from the last Lambda_N window.
inline FrequencyCheck frequency_consistency_check(const SystemSpec& spec, const RationalFunction& u,
                                                  const std::vector<std::complex<double>>& s_samples,
                                                  const RationalFunction* x0 = nullptr) {
  if (x0 != nullptr)
    for (size_t i = 0; i < x0->cell_count(); ++i)
      for (const auto& v : x0->cell(i))
        if (v != 0) throw Error(ErrorKind::kInvalidInput, "frequency check requires a zero initial condition");
  const Rational rho = u.mesh_step();
  const long window = delay_cells(spec, spec.n_delays() - 1, rho);
  RationalFunction zero_x0(rho, -window, spec.d, static_cast<size_t>(window));
  Trajectory traj = simulate(spec, zero_x0, u);
  const long k_cells = static_cast<long>(u.cell_count());
  const double h = to_double(rho);

  double a = 0.0;
  for (const auto& aj : spec.a_double()) a += spectral_norm(aj);
  double last_window_max = 0.0;
  for (long k = k_cells - window; k < k_cells; ++k) {
    double norm2 = 0.0;
    for (const auto& v : traj.x.at_cell(k)) norm2 += v.get_d() * v.get_d();
    last_window_max = std::max(last_window_max, std::sqrt(norm2));
  }

  FrequencyCheck out;
  out.alpha0 = frequency_alpha0(spec, rho);
  const Eigen::MatrixXcd b = spec.b.to_double().cast<std::complex<double>>();
  for (auto s : s_samples) {
    const double sigma = s.real();
    if (!(sigma > out.alpha0) || !(sigma > 0.0))
      throw Error(ErrorKind::kInvalidInput, "sample Re s must exceed the growth abscissa");
    const std::complex<double> cell_factor = (1.0 - std::exp(-s * h)) / s;
    Eigen::VectorXcd x_t = Eigen::VectorXcd::Zero(spec.d), u_t = Eigen::VectorXcd::Zero(spec.m);
    double x_abs = 0.0, u_abs = 0.0;
    for (long k = 0; k < k_cells; ++k) {
      std::complex<double> w = std::exp(-s * (static_cast<double>(k) * h)) * cell_factor;
      auto xk = traj.x.at_cell(k);
      auto uk = u.at_cell(k);
      for (size_t c = 0; c < spec.d; ++c) {
        x_t(c) += w * xk[c].get_d();
        x_abs += std::abs(w) * std::abs(xk[c].get_d());
      }
      for (size_t c = 0; c < spec.m; ++c) {
        u_t(c) += w * uk[c].get_d();
        u_abs += std::abs(w) * std::abs(uk[c].get_d());
      }
    }
    const Eigen::MatrixXcd h_s = h_eval(spec, s);
    FrequencySample sample;
    sample.s = s;
    sample.residual = (h_s * x_t - b * u_t).norm();

    // sum_{i >= 0} psi(i) e^{-sigma rho i} * (1 - e^{-sigma rho}) / sigma with
    // psi(i) = a^{floor(i / n) + 1} (a <= 1) or a^{i + 1} (a > 1).
    const double e1 = std::exp(-sigma * h);
    double tail;
    if (a <= 1.0) {
      const double en = std::exp(-sigma * h * static_cast<double>(window));
      tail = a * (1.0 - en) / (sigma * (1.0 - a * en));
    } else {
      tail = a * (1.0 - e1) / (sigma * (1.0 - a * e1));
    }
    const double h_norm = Eigen::JacobiSVD<Eigen::MatrixXcd>(h_s).singularValues()(0);
    sample.tail_bound = h_norm * last_window_max * tail * std::exp(-sigma * h * static_cast<double>(k_cells));
    sample.rounding_slack = 1e-13 * (h_norm * x_abs + spectral_norm(spec.b.to_double()) * u_abs);
    out.max_residual = std::max(out.max_residual, sample.residual);
    out.samples.push_back(sample);
  }
  return out;
}

}  // namespace lcdde
