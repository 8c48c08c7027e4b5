#pragma once

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lcdde/bezout.hpp"
#include "lcdde/config.hpp"
#include "lcdde/corona.hpp"
#include "lcdde/error.hpp"
#include "lcdde/hautus.hpp"
#include "lcdde/simulate.hpp"

namespace lcdde {

inline constexpr const char* kToolName = "lcdde";
inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitInconclusive = 2, kExitUsage = 3 };

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

namespace report {

using nlohmann::json;

inline json complex_json(std::complex<double> z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline json measure_json(const DiracSumMeasure& m) {
  json atoms = json::array();
  for (const auto& a : m.atoms()) atoms.push_back(json::array({a.lag.str(), to_string(a.weight)}));
  return atoms;
}

inline json polynomial_json(const RationalPolynomial& p) {
  json coeffs = json::array();
  for (const auto& c : p.coefficients()) coeffs.push_back(to_string(c));
  return coeffs;
}

inline json cells_json(const RationalFunction& f) {
  json cells = json::array();
  for (size_t i = 0; i < f.cell_count(); ++i) {
    json cell = json::array();
    for (const auto& v : f.cell(i)) cell.push_back(to_string(v));
    cells.push_back(cell);
  }
  return cells;
}

inline json certificate_json(const ViolationCertificate& cert) {
  json entries = json::array();
  for (const auto& e : cert.entries)
    entries.push_back({{"epsilon", e.epsilon},
                       {"s", complex_json(e.s)},
                       {"value", e.value},
                       {"bound", e.bound},
                       {"beta", e.beta},
                       {"kronecker_epsilon", e.kronecker_epsilon}});
  return {{"kind", cert.lag_zero ? "lag-zero" : "character"},
          {"sigma", cert.sigma},
          {"phases", cert.phases},
          {"C", cert.constant_c},
          {"C_tilde", cert.constant_c_tilde},
          {"character_residual", cert.character_residual},
          {"sequence", entries}};
}

inline void write_scan_csv(const std::string& path, const std::vector<ScanRow>& rows, size_t q,
                           const std::string& value_name) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kInvalidInput, "cannot write csv '" + path + "'");
  out << "sigma";
  for (size_t k = 0; k < q; ++k) out << ",angle" << (k + 1);
  out << "," << value_name << "\n";
  out << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.sigma;
    for (double a : r.angles) out << "," << a;
    out << "," << r.value << "\n";
  }
}

}  // namespace report

struct CliOptions {
  std::string subcommand;
  std::string config_path;
  std::optional<std::string> out_path;
  std::optional<std::string> csv_path;
  std::vector<double> window;
  std::vector<int> grid;
  std::optional<double> tol;
  std::optional<int> refine;
  std::optional<int> workers;
};

namespace detail {

inline ScanGrid make_grid(const AnalysisConfig& cfg, const CliOptions& opt, ScanGrid base) {
  if (cfg.scan.n_sigma) base.n_sigma = *cfg.scan.n_sigma;
  if (cfg.scan.n_torus) base.n_torus = *cfg.scan.n_torus;
  if (cfg.scan.refine) base.refine_passes = *cfg.scan.refine;
  base.workers = cfg.scan.workers;
  base.half_torus = cfg.scan.half_torus;
  if (opt.grid.size() == 2) {
    base.n_sigma = opt.grid[0];
    base.n_torus = opt.grid[1];
  }
  if (opt.refine) base.refine_passes = *opt.refine;
  if (opt.workers) base.workers = *opt.workers;
  return base;
}

inline SigmaWindow make_window(const AnalysisConfig& cfg, const CliOptions& opt, SigmaWindow fallback) {
  if (opt.window.size() == 2) return {opt.window[0], opt.window[1]};
  return cfg.scan.window.value_or(fallback);
}

inline RationalFunction cells_to_function(const std::vector<std::vector<Rational>>& cells, const Rational& rho,
                                          long start_cell, size_t dim) {
  RationalFunction f(rho, start_cell, dim, cells.size());
  for (size_t i = 0; i < cells.size(); ++i) f.cell(i) = cells[i];
  return f;
}

struct Outcome {
  int code = kExitPass;
  nlohmann::json verdicts = nlohmann::json::object();
  nlohmann::json numerics = nlohmann::json::object();
  nlohmann::json witnesses = nlohmann::json::object();
  nlohmann::json certificates = nlohmann::json::object();
};

inline int verdict_code(Verdict v) {
  return v == Verdict::kPass ? kExitPass : v == Verdict::kFail ? kExitFail : kExitInconclusive;
}

inline Outcome run_analyze(const AnalysisConfig& cfg, const CliOptions& opt, std::optional<std::string> csv) {
  const SystemSpec& spec = *cfg.system;
  HautusThresholds th;
  if (opt.tol) th.pass_scale = *opt.tol;
  else if (cfg.scan.tol) th.pass_scale = *cfg.scan.tol;
  SigmaWindow window = make_window(cfg, opt, default_hautus_window(spec));
  ScanGrid grid = make_grid(cfg, opt, default_hautus_grid());
  std::vector<ScanRow> rows;
  HautusReport rep = hautus_decide(spec, window, grid, th, csv ? &rows : nullptr);
  if (csv) report::write_scan_csv(*csv, rows, spec.delay_lattice().q(), "sigma_min");

  Outcome o;
  o.code = verdict_code(rep.overall);
  o.verdicts = {{"cond_i", to_string(rep.cond_i.verdict)},
                {"cond_ii", to_string(rep.cond_ii.verdict)},
                {"overall", to_string(rep.overall)},
                {"plus_infinity_endpoint", rep.cond_i.plus_infinity_pass ? "pass" : "fail"},
                {"minus_infinity_endpoint", rep.cond_i.minus_infinity_pass ? "pass" : "fail"}};
  o.numerics = {{"min_sigma_min", rep.cond_i.min_sigma_min},
                {"grid_min_sigma_min", rep.cond_i.grid_min},
                {"cond_ii_rank", rep.cond_ii.rank},
                {"cond_ii_sigma_min", rep.cond_ii.sigma_min},
                {"plus_infinity_sigma_min", rep.cond_i.plus_infinity_sigma_min},
                {"minus_infinity_sigma_min", rep.cond_i.minus_infinity_sigma_min},
                {"fail_threshold", rep.cond_i.fail_threshold},
                {"pass_threshold", rep.cond_i.pass_threshold},
                {"window", {window.lo, window.hi}},
                {"grid", {grid.n_sigma, grid.n_torus > 0 ? grid.n_torus : default_torus_resolution(spec.delay_lattice().q())}}};
  o.witnesses = {{"argmin_sigma", rep.cond_i.argmin_sigma}, {"argmin_phases", rep.cond_i.argmin_phases}};
  bool commensurable = std::all_of(spec.delays.begin(), spec.delays.end(), [](const auto& l) { return l.is_rational(); });
  if (commensurable) {
    ReachabilityOperator op = build_reachability(spec);
    o.numerics["reachability_rank"] = op.rank();
    o.numerics["reachability_rows"] = op.control_map.rows();
    o.numerics["horizon"] = to_string(Rational(static_cast<long>(spec.d)) * spec.delays.back().rational_value());
    o.verdicts["reachability_surjective"] = op.surjective();
  }
  return o;
}

inline Outcome run_corona(const AnalysisConfig& cfg, const CliOptions& opt, std::optional<std::string> csv) {
  CoronaInstance inst(*cfg.corona, cfg.generators);
  SigmaWindow window = make_window(cfg, opt, default_corona_window(inst));
  ScanGrid grid = make_grid(cfg, opt, ScanGrid{});
  std::vector<ScanRow> rows;
  CoronaReport rep = corona_analyze(inst, window, grid, csv ? &rows : nullptr);
  if (opt.tol || cfg.scan.tol) {
    double scale = opt.tol ? *opt.tol : *cfg.scan.tol;
    rep.decision_threshold = scale * inst.max_tv_norm();
    if (!rep.exact)
      rep.verdict = rep.estimate.alpha_hat > rep.decision_threshold ? CoronaVerdict::kHolds : CoronaVerdict::kInconclusive;
  }
  if (csv) report::write_scan_csv(*csv, rows, inst.q(), "G");

  Outcome o;
  o.code = rep.verdict == CoronaVerdict::kHolds ? kExitPass
           : rep.verdict == CoronaVerdict::kFails ? kExitFail
                                                   : kExitInconclusive;
  o.verdicts = {{"corona", to_string(rep.verdict)}, {"exact", rep.exact}};
  o.numerics = {{"alpha_hat", rep.estimate.alpha_hat},
                {"grid_min", rep.estimate.grid_min},
                {"minus_infinity_value", rep.estimate.minus_infinity_value},
                {"decision_threshold", rep.decision_threshold},
                {"q", inst.q()},
                {"window", {window.lo, window.hi}}};
  nlohmann::json basis = nlohmann::json::array();
  for (const auto& g : inst.decomposition().basis())
    basis.push_back({{"label", g.label}, {"scale", to_string(g.rational_scale)}, {"value", g.value}});
  o.numerics["basis"] = basis;
  if (rep.estimate.witness.at_minus_infinity) {
    o.witnesses["alpha_hat_at"] = "re(s) -> -infinity";
  } else {
    o.witnesses["sigma"] = rep.estimate.witness.sigma;
    o.witnesses["phases"] = rep.estimate.witness.phases;
    if (auto s = rep.estimate.witness.frequency(inst.decomposition())) o.witnesses["s"] = report::complex_json(*s);
  }
  if (rep.decision) {
    nlohmann::json polys = nlohmann::json::array();
    for (const auto& p : rep.decision->polynomials) polys.push_back(report::polynomial_json(p));
    o.numerics["polynomials"] = polys;
    o.certificates["gcd"] = report::polynomial_json(rep.decision->gcd);
  }
  if (rep.certificate) o.certificates["violation"] = report::certificate_json(*rep.certificate);
  return o;
}

inline Outcome run_bezout(const AnalysisConfig& cfg) {
  CoronaInstance inst(*cfg.corona, cfg.generators);
  Outcome o;
  try {
    BezoutCertificate cert = measure_bezout(inst);
    nlohmann::json cof = nlohmann::json::array();
    for (const auto& g : cert.cofactors) cof.push_back(report::measure_json(g));
    o.certificates["cofactors"] = cof;
    o.certificates["residual"] = report::measure_json(cert.residual);
    o.certificates["verified"] = cert.verified;
    o.verdicts["bezout"] = cert.verified ? "solved" : "verification-failed";
    o.code = cert.verified ? kExitPass : kExitFail;
  } catch (const CoronaViolated& e) {
    o.verdicts["bezout"] = "not-coprime";
    o.certificates["gcd"] = report::polynomial_json(e.gcd());
    o.code = kExitFail;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kUnsupportedCase) throw;
    o.verdicts["bezout"] = "unsupported";
    o.numerics["reason"] = e.what();
    o.code = kExitInconclusive;
  }
  return o;
}

inline Outcome run_simulate(const AnalysisConfig& cfg, std::optional<std::string> csv) {
  const SystemSpec& spec = *cfg.system;
  if (!cfg.simulate) throw ConfigError({"simulate: section required"});
  const CellData& data = *cfg.simulate;
  Rational rho = data.mesh.value_or(commensurable_step(spec));
  long window = delay_cells(spec, spec.n_delays() - 1, rho);
  RationalFunction x0(rho, -window, spec.d, static_cast<size_t>(window));
  if (!data.x0.empty()) {
    if (static_cast<long>(data.x0.size()) != window)
      throw ConfigError({"simulate.x0: expected " + std::to_string(window) + " cells"});
    x0 = cells_to_function(data.x0, rho, -window, spec.d);
  }
  RationalFunction u = cells_to_function(data.u, rho, 0, spec.m);
  Trajectory traj = simulate(spec, x0, u);
  if (csv) {
    std::ofstream out(*csv);
    if (!out) throw Error(ErrorKind::kInvalidInput, "cannot write csv '" + *csv + "'");
    out << "t_cell_start";
    for (size_t c = 0; c < spec.d; ++c) out << ",x" << (c + 1);
    for (size_t c = 0; c < spec.m; ++c) out << ",u" << (c + 1);
    out << "\n";
    for (long k = traj.x.start_cell(); k < traj.x.end_cell(); ++k) {
      out << to_string(rho * k);
      for (const auto& v : traj.x.at_cell(k)) out << "," << to_string(v);
      auto uk = traj.u.at_cell(k);
      for (const auto& v : uk) out << "," << (k < 0 ? std::string("") : to_string(v));
      out << "\n";
    }
  }
  Outcome o;
  o.verdicts["simulate"] = "ok";
  o.numerics = {{"mesh_step", to_string(rho)}, {"cells", traj.x.cell_count()}};
  o.numerics["state"] = report::cells_json(traj.x);
  return o;
}

inline Outcome run_steer(const AnalysisConfig& cfg) {
  const SystemSpec& spec = *cfg.system;
  if (!cfg.steer) throw ConfigError({"steer: section required"});
  const CellData& data = *cfg.steer;
  Rational rho = data.mesh.value_or(commensurable_step(spec));
  ReachabilityOperator op = build_reachability(spec, data.horizon, rho);
  RationalFunction x0(rho, -op.window_cells, spec.d, static_cast<size_t>(op.window_cells));
  if (!data.x0.empty()) {
    if (static_cast<long>(data.x0.size()) != op.window_cells)
      throw ConfigError({"steer.x0: expected " + std::to_string(op.window_cells) + " cells"});
    x0 = cells_to_function(data.x0, rho, -op.window_cells, spec.d);
  }
  if (static_cast<long>(data.target.size()) != op.window_cells)
    throw ConfigError({"steer.target: expected " + std::to_string(op.window_cells) + " cells"});
  RationalFunction target = cells_to_function(data.target, rho, -op.window_cells, spec.d);
  SteerResult res = steer(spec, op, x0, target);
  Outcome o;
  o.numerics = {{"mesh_step", to_string(rho)},
                {"horizon_cells", op.horizon_cells},
                {"reachability_rank", op.rank()},
                {"reachability_rows", op.control_map.rows()}};
  if (res.control) {
    o.verdicts["steer"] = "reached";
    o.certificates["control"] = report::cells_json(*res.control);
    o.code = kExitPass;
  } else {
    o.verdicts["steer"] = "unreachable";
    nlohmann::json w = nlohmann::json::array();
    for (const auto& v : *res.unreachable_certificate) w.push_back(to_string(v));
    o.certificates["left_null_vector"] = w;
    o.code = kExitFail;
  }
  return o;
}

}  // namespace detail

/// Runs one subcommand on a parsed config. Returns the exit code and writes
/// the JSON report to `report_out`.
inline int run(const CliOptions& opt, const AnalysisConfig& cfg, std::ostream& report_out) {
  const bool needs_system = opt.subcommand == "analyze" || opt.subcommand == "simulate" || opt.subcommand == "steer";
  if (needs_system && (!cfg.system || cfg.corona))
    throw ConfigError({opt.subcommand + ": requires a system section and no corona section"});
  if (!needs_system && (!cfg.corona || cfg.system))
    throw ConfigError({opt.subcommand + ": requires a corona section and no system section"});
  std::optional<std::string> csv = opt.csv_path ? opt.csv_path : cfg.csv_path;

  detail::Outcome o;
  if (opt.subcommand == "analyze") o = detail::run_analyze(cfg, opt, csv);
  else if (opt.subcommand == "corona") o = detail::run_corona(cfg, opt, csv);
  else if (opt.subcommand == "bezout") o = detail::run_bezout(cfg);
  else if (opt.subcommand == "simulate") o = detail::run_simulate(cfg, csv);
  else o = detail::run_steer(cfg);

  nlohmann::json doc = {{"meta",
                         {{"tool", kToolName},
                          {"version", kToolVersion},
                          {"subcommand", opt.subcommand},
                          {"config_sha256", sha256_hex(cfg.raw_text)},
                          {"exit_code", o.code}}},
                        {"verdicts", o.verdicts},
                        {"numerics", o.numerics},
                        {"witnesses", o.witnesses},
                        {"certificates", o.certificates}};
  report_out << doc.dump(2) << "\n";
  return o.code;
}

/// Full command-line entry point: parse flags, load config, dispatch.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Corona / Bezout and Hautus-criterion analysis for delayed difference equations", kToolName};
  CliOptions opt;
  app.add_option("subcommand", opt.subcommand, "analyze | corona | bezout | simulate | steer")->required();
  app.add_option("--config", opt.config_path, "JSON config file")->required();
  app.add_option("--out", opt.out_path, "report path (default: output.report or stdout)");
  app.add_option("--csv", opt.csv_path, "CSV export path");
  app.add_option("--window", opt.window, "sigma window lo hi")->expected(2);
  app.add_option("--grid", opt.grid, "n_sigma n_torus")->expected(2);
  app.add_option("--tol", opt.tol, "pass threshold scale");
  app.add_option("--refine", opt.refine, "local refinement passes");
  app.add_option("--workers", opt.workers, "scan worker threads");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }
  static const std::vector<std::string> subcommands = {"analyze", "corona", "bezout", "simulate", "steer"};
  if (std::find(subcommands.begin(), subcommands.end(), opt.subcommand) == subcommands.end()) {
    err << "unknown subcommand '" << opt.subcommand << "'\n" << app.help();
    return kExitUsage;
  }
  if (opt.window.size() == 2 && !(opt.window[0] < opt.window[1])) {
    err << "--window: expected lo < hi\n";
    return kExitUsage;
  }
  if (opt.grid.size() == 2 && (opt.grid[0] < 2 || opt.grid[1] < 2)) {
    err << "--grid: resolutions must be >= 2\n";
    return kExitUsage;
  }
  try {
    AnalysisConfig cfg = parse_config(opt.config_path);
    std::optional<std::string> path = opt.out_path ? opt.out_path : cfg.report_path;
    std::ostringstream buffer;
    int code = run(opt, cfg, buffer);
    if (path) {
      std::ofstream file(*path, std::ios::binary);
      if (!file) throw Error(ErrorKind::kInvalidInput, "cannot write report '" + *path + "'");
      file << buffer.str();
    } else {
      out << buffer.str();
    }
    return code;
  } catch (const ConfigError& e) {
    for (const auto& p : e.problems()) err << "config error: " << p << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace lcdde
