#pragma once

#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lcdde/error.hpp"
#include "lcdde/lag.hpp"
#include "lcdde/measure.hpp"
#include "lcdde/rational.hpp"
#include "lcdde/scan.hpp"
#include "lcdde/system.hpp"

namespace lcdde {

/// Raised by parse_config with one entry per offending field.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : Error(ErrorKind::kConfigError, join(problems)), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : "; ") + s;
    return out;
  }
  std::vector<std::string> problems_;
};

struct CellData {
  std::optional<Rational> mesh;  // defaults to the commensurable step
  std::vector<std::vector<Rational>> x0;
  std::vector<std::vector<Rational>> u;       // simulate
  std::vector<std::vector<Rational>> target;  // steer
  std::optional<Rational> horizon;            // steer, defaults to d * Lambda_N
};

struct ScanSettings {
  std::optional<SigmaWindow> window;
  std::optional<int> n_sigma;
  std::optional<int> n_torus;
  std::optional<double> tol;
  std::optional<int> refine;
  int workers = 1;
  bool half_torus = false;
};

struct AnalysisConfig {
  GeneratorTable generators;
  std::optional<SystemSpec> system;
  std::optional<std::vector<DiracSumMeasure>> corona;
  ScanSettings scan;
  std::optional<CellData> simulate;
  std::optional<CellData> steer;
  std::optional<std::string> report_path;
  std::optional<std::string> csv_path;
  std::string raw_text;  // exact bytes the config was parsed from
};

namespace detail {

using nlohmann::json;

struct FieldParser {
  std::vector<std::string> problems;

  void fail(const std::string& field, const std::string& msg) { problems.push_back(field + ": " + msg); }

  std::optional<Rational> rational(const json& j, const std::string& field) {
    try {
      if (j.is_string()) return parse_rational(j.get<std::string>());
      if (j.is_number_integer()) return Rational(std::to_string(j.get<long long>()));
      if (j.is_number_unsigned()) return Rational(std::to_string(j.get<unsigned long long>()));
      if (j.is_number_float()) return rational_from_double(j.get<double>());
    } catch (const std::exception& e) {
      fail(field, e.what());
      return std::nullopt;
    }
    fail(field, "expected a number or a rational string");
    return std::nullopt;
  }

  std::optional<LagExpr> lag(const json& j, const std::string& field, const GeneratorTable& table) {
    try {
      if (j.is_string()) return parse_lag(j.get<std::string>(), &table);
      if (auto r = rational(j, field)) {
        if (*r < 0) {
          fail(field, "negative lag");
          return std::nullopt;
        }
        return LagExpr(*r);
      }
      return std::nullopt;
    } catch (const std::exception& e) {
      fail(field, e.what());
      return std::nullopt;
    }
  }

  std::optional<RationalMatrix> matrix(const json& j, const std::string& field, size_t rows, size_t cols) {
    if (!j.is_array() || j.size() != rows) {
      fail(field, "expected " + std::to_string(rows) + " rows");
      return std::nullopt;
    }
    RationalMatrix m(rows, cols);
    bool ok = true;
    for (size_t r = 0; r < rows; ++r) {
      const std::string row_field = field + "[" + std::to_string(r) + "]";
      if (!j[r].is_array() || j[r].size() != cols) {
        fail(row_field, "row length must be " + std::to_string(cols));
        ok = false;
        continue;
      }
      for (size_t c = 0; c < cols; ++c) {
        auto v = rational(j[r][c], row_field + "[" + std::to_string(c) + "]");
        if (v) m(r, c) = *v; else ok = false;
      }
    }
    return ok ? std::optional<RationalMatrix>(std::move(m)) : std::nullopt;
  }

  std::vector<std::vector<Rational>> cells(const json& j, const std::string& field, size_t dim) {
    std::vector<std::vector<Rational>> out;
    if (!j.is_array()) {
      fail(field, "expected an array of cells");
      return out;
    }
    for (size_t i = 0; i < j.size(); ++i) {
      const std::string cf = field + "[" + std::to_string(i) + "]";
      if (!j[i].is_array() || j[i].size() != dim) {
        fail(cf, "each cell must have " + std::to_string(dim) + " components");
        continue;
      }
      std::vector<Rational> cell;
      for (size_t c = 0; c < dim; ++c) cell.push_back(rational(j[i][c], cf).value_or(Rational(0)));
      out.push_back(std::move(cell));
    }
    return out;
  }
};

}  // namespace detail

/// Parses and validates a JSON analysis config. Numbers may be JSON numbers
/// or strings ("3/2", "0.25"); strings survive exactly.
inline AnalysisConfig parse_config_text(const std::string& text) {
  using nlohmann::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("syntax: ") + e.what()});
  }
  if (!root.is_object()) throw ConfigError({"root: expected an object"});

  detail::FieldParser p;
  AnalysisConfig cfg;
  cfg.raw_text = text;

  static const std::vector<std::string> known = {"generators", "system", "corona", "scan",
                                                 "simulate",   "steer",  "output"};
  for (const auto& [key, _] : root.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) p.fail(key, "unknown section");

  if (root.contains("generators")) {
    const auto& g = root["generators"];
    if (!g.is_object()) {
      p.fail("generators", "expected an object label -> value");
    } else {
      for (const auto& [label, value] : g.items()) {
        try {
          if (!value.is_number()) throw Error(ErrorKind::kInvalidInput, "value must be a number");
          if (!detail::is_label(label)) throw Error(ErrorKind::kInvalidInput, "invalid label");
          cfg.generators.declare(label, value.get<double>());
        } catch (const std::exception& e) {
          p.fail("generators." + label, e.what());
        }
      }
    }
  }

  if (root.contains("system")) {
    const auto& s = root["system"];
    SystemSpec spec;
    spec.generators = cfg.generators;
    bool dims_ok = s.is_object() && s.contains("d") && s["d"].is_number_unsigned() && s.contains("m") &&
                   s["m"].is_number_unsigned() && s["d"].get<size_t>() > 0 && s["m"].get<size_t>() > 0;
    if (!dims_ok) {
      p.fail("system", "requires positive integers d and m");
    } else {
      spec.d = s["d"].get<size_t>();
      spec.m = s["m"].get<size_t>();
      if (!s.contains("delays") || !s["delays"].is_array() || s["delays"].empty()) {
        p.fail("system.delays", "expected a nonempty array");
      } else {
        for (size_t j = 0; j < s["delays"].size(); ++j)
          if (auto l = p.lag(s["delays"][j], "system.delays[" + std::to_string(j) + "]", cfg.generators))
            spec.delays.push_back(*l);
      }
      if (!s.contains("A") || !s["A"].is_array()) {
        p.fail("system.A", "expected an array of matrices");
      } else {
        for (size_t j = 0; j < s["A"].size(); ++j)
          if (auto a = p.matrix(s["A"][j], "system.A[" + std::to_string(j) + "]", spec.d, spec.d))
            spec.a.push_back(*a);
      }
      if (!s.contains("B")) {
        p.fail("system.B", "missing");
      } else if (auto b = p.matrix(s["B"], "system.B", spec.d, spec.m)) {
        spec.b = *b;
      }
      if (p.problems.empty())
        for (auto& e : spec.validation_errors()) p.problems.push_back(e);
      if (p.problems.empty()) cfg.system = std::move(spec);
    }
  }

  if (root.contains("corona")) {
    const auto& c = root["corona"];
    if (!c.is_object() || !c.contains("measures") || !c["measures"].is_array() || c["measures"].empty()) {
      p.fail("corona.measures", "expected a nonempty array of measures");
    } else {
      std::vector<DiracSumMeasure> measures;
      for (size_t k = 0; k < c["measures"].size(); ++k) {
        const std::string mf = "corona.measures[" + std::to_string(k) + "]";
        const auto& mj = c["measures"][k];
        if (!mj.is_array()) {
          p.fail(mf, "expected a list of [lag, weight] pairs");
          continue;
        }
        std::vector<Atom> atoms;
        for (size_t a = 0; a < mj.size(); ++a) {
          const std::string af = mf + "[" + std::to_string(a) + "]";
          if (!mj[a].is_array() || mj[a].size() != 2) {
            p.fail(af, "expected [lag, weight]");
            continue;
          }
          auto lag = p.lag(mj[a][0], af + ".lag", cfg.generators);
          auto w = p.rational(mj[a][1], af + ".weight");
          if (lag && w) atoms.push_back(Atom{*lag, *w});
        }
        measures.push_back(normalize(std::move(atoms)));
      }
      if (std::all_of(measures.begin(), measures.end(), [](const auto& m) { return m.is_zero(); }))
        p.fail("corona.measures", "all measures are zero");
      cfg.corona = std::move(measures);
    }
  }

  if (root.contains("scan")) {
    const auto& s = root["scan"];
    if (!s.is_object()) {
      p.fail("scan", "expected an object");
    } else {
      if (s.contains("window")) {
        const auto& w = s["window"];
        if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number() ||
            !(w[0].get<double>() < w[1].get<double>()))
          p.fail("scan.window", "expected [lo, hi] with lo < hi");
        else
          cfg.scan.window = SigmaWindow{w[0].get<double>(), w[1].get<double>()};
      }
      if (s.contains("grid")) {
        const auto& g = s["grid"];
        if (!g.is_array() || g.size() != 2 || !g[0].is_number_integer() || !g[1].is_number_integer() ||
            g[0].get<int>() < 2 || g[1].get<int>() < 2)
          p.fail("scan.grid", "expected [n_sigma, n_torus], both >= 2");
        else {
          cfg.scan.n_sigma = g[0].get<int>();
          cfg.scan.n_torus = g[1].get<int>();
        }
      }
      if (s.contains("tol")) {
        if (!s["tol"].is_number() || !(s["tol"].get<double>() > 0)) p.fail("scan.tol", "expected a positive number");
        else cfg.scan.tol = s["tol"].get<double>();
      }
      if (s.contains("refine")) {
        if (!s["refine"].is_number_integer() || s["refine"].get<int>() < 0) p.fail("scan.refine", "expected k >= 0");
        else cfg.scan.refine = s["refine"].get<int>();
      }
      if (s.contains("workers")) {
        if (!s["workers"].is_number_integer() || s["workers"].get<int>() < 1) p.fail("scan.workers", "expected >= 1");
        else cfg.scan.workers = s["workers"].get<int>();
      }
      if (s.contains("half_torus")) {
        if (!s["half_torus"].is_boolean()) p.fail("scan.half_torus", "expected a boolean");
        else cfg.scan.half_torus = s["half_torus"].get<bool>();
      }
    }
  }

  auto parse_cells = [&](const char* section, bool is_steer) -> std::optional<CellData> {
    if (!root.contains(section)) return std::nullopt;
    const auto& s = root[section];
    const std::string name(section);
    if (!s.is_object()) {
      p.fail(name, "expected an object");
      return std::nullopt;
    }
    if (!cfg.system) {
      p.fail(name, "requires a valid system section");
      return std::nullopt;
    }
    CellData data;
    if (s.contains("mesh")) data.mesh = p.rational(s["mesh"], name + ".mesh");
    if (s.contains("x0")) data.x0 = p.cells(s["x0"], name + ".x0", cfg.system->d);
    if (is_steer) {
      if (s.contains("target")) data.target = p.cells(s["target"], name + ".target", cfg.system->d);
      else p.fail(name + ".target", "missing");
      if (s.contains("horizon")) data.horizon = p.rational(s["horizon"], name + ".horizon");
    } else {
      if (s.contains("u")) data.u = p.cells(s["u"], name + ".u", cfg.system->m);
      else p.fail(name + ".u", "missing");
    }
    return data;
  };
  cfg.simulate = parse_cells("simulate", false);
  cfg.steer = parse_cells("steer", true);

  if (root.contains("output")) {
    const auto& o = root["output"];
    if (!o.is_object()) {
      p.fail("output", "expected an object");
    } else {
      if (o.contains("report")) {
        if (o["report"].is_string()) cfg.report_path = o["report"].get<std::string>();
        else p.fail("output.report", "expected a path string");
      }
      if (o.contains("csv")) {
        if (o["csv"].is_string()) cfg.csv_path = o["csv"].get<std::string>();
        else p.fail("output.csv", "expected a path string");
      }
    }
  }

  if (!p.problems.empty()) throw ConfigError(std::move(p.problems));
  return cfg;
}

inline AnalysisConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"config: cannot read '" + path + "'"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace lcdde
