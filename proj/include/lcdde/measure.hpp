#pragma once

#include <algorithm>
#include <complex>
#include <utility>
#include <vector>

#include "lcdde/error.hpp"
#include "lcdde/lag.hpp"
#include "lcdde/rational.hpp"

namespace lcdde {

/// One Dirac mass `weight * delta_{-lag}`.
struct Atom {
  LagExpr lag;
  Rational weight;

  friend bool operator==(const Atom& a, const Atom& b) { return a.lag == b.lag && a.weight == b.weight; }
};

class DiracSumMeasure;
DiracSumMeasure normalize(std::vector<Atom> raw);

/// Finite atomic measure sum_j h_j delta_{-lambda_j} supported on the
/// nonpositive half-line. Atoms are kept merged, nonzero and sorted by lag;
/// the empty list is the zero measure.
class DiracSumMeasure {
 public:
  DiracSumMeasure() = default;

  static DiracSumMeasure unit() { return DiracSumMeasure({Atom{LagExpr(), Rational(1)}}); }
  static DiracSumMeasure dirac(const LagExpr& lag, const Rational& weight = 1) {
    return normalize({Atom{lag, weight}});
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  size_t size() const { return atoms_.size(); }
  bool is_zero() const { return atoms_.empty(); }

  bool has_rational_lags() const {
    return std::all_of(atoms_.begin(), atoms_.end(), [](const Atom& a) { return a.lag.is_rational(); });
  }

  /// Largest lag; requires rational lags. Zero for the zero measure.
  Rational support_bound() const {
    Rational bound(0);
    for (const auto& a : atoms_) bound = std::max(bound, a.lag.rational_value());
    return bound;
  }

  double support_bound(const GeneratorTable& table) const {
    double bound = 0.0;
    for (const auto& a : atoms_) bound = std::max(bound, a.lag.value(table));
    return bound;
  }

  /// Weight of the atom at lag 0 (the value of the lag-0 homomorphism).
  Rational weight_at_zero() const {
    return (!atoms_.empty() && atoms_.front().lag.is_zero()) ? atoms_.front().weight : Rational(0);
  }

  friend bool operator==(const DiracSumMeasure& a, const DiracSumMeasure& b) { return a.atoms_ == b.atoms_; }

 private:
  friend DiracSumMeasure normalize(std::vector<Atom> raw);
  explicit DiracSumMeasure(std::vector<Atom> sorted_atoms) : atoms_(std::move(sorted_atoms)) {}

  std::vector<Atom> atoms_;
};

/// Merges duplicate lags, drops zero weights, sorts by lag.
inline DiracSumMeasure normalize(std::vector<Atom> raw) {
  std::sort(raw.begin(), raw.end(), [](const Atom& a, const Atom& b) { return a.lag < b.lag; });
  std::vector<Atom> merged;
  for (auto& atom : raw) {
    if (!merged.empty() && merged.back().lag == atom.lag) {
      merged.back().weight += atom.weight;
    } else {
      merged.push_back(std::move(atom));
    }
  }
  std::erase_if(merged, [](const Atom& a) { return a.weight == 0; });
  return DiracSumMeasure(std::move(merged));
}

/// Convenience form for purely rational lags given as (lag, weight) pairs.
inline DiracSumMeasure normalize(const std::vector<std::pair<Rational, Rational>>& raw) {
  std::vector<Atom> atoms;
  atoms.reserve(raw.size());
  for (const auto& [lag, weight] : raw) {
    if (lag < 0) throw Error(ErrorKind::kInvalidInput, "negative lag " + to_string(lag));
    atoms.push_back(Atom{LagExpr(lag), weight});
  }
  return normalize(std::move(atoms));
}

inline DiracSumMeasure operator+(const DiracSumMeasure& a, const DiracSumMeasure& b) {
  std::vector<Atom> all = a.atoms();
  all.insert(all.end(), b.atoms().begin(), b.atoms().end());
  return normalize(std::move(all));
}

inline DiracSumMeasure operator*(const Rational& k, const DiracSumMeasure& m) {
  std::vector<Atom> out = m.atoms();
  for (auto& a : out) a.weight *= k;
  return normalize(std::move(out));
}

inline DiracSumMeasure operator-(const DiracSumMeasure& a, const DiracSumMeasure& b) {
  return a + Rational(-1) * b;
}

/// Exact convolution: delta_{-a} * delta_{-b} = delta_{-(a+b)}.
inline DiracSumMeasure convolve(const DiracSumMeasure& a, const DiracSumMeasure& b) {
  std::vector<Atom> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a.atoms())
    for (const auto& y : b.atoms()) out.push_back(Atom{x.lag + y.lag, x.weight * y.weight});
  return normalize(std::move(out));
}

inline const GeneratorTable& rational_generators() {
  static const GeneratorTable table;
  return table;
}

/// Laplace transform sum_j h_j e^{s lambda_j}.
inline std::complex<double> laplace_eval(const DiracSumMeasure& m, std::complex<double> s,
                                         const GeneratorTable& table = rational_generators()) {
  std::complex<double> acc = 0.0;
  for (const auto& a : m.atoms()) acc += to_double(a.weight) * std::exp(s * a.lag.value(table));
  return acc;
}

/// Total variation norm: sum of absolute weights.
inline Rational tv_norm(const DiracSumMeasure& m) {
  Rational n(0);
  for (const auto& a : m.atoms()) n += abs(a.weight);
  return n;
}

template <typename T>
T scalar_cast(const Rational& r) {
  if constexpr (std::is_same_v<T, Rational>) {
    return r;
  } else {
    return static_cast<T>(to_double(r));
  }
}

/// Vector-valued function constant on the cells
/// [(start_cell + k) * mesh_step, (start_cell + k + 1) * mesh_step).
template <typename T>
class PiecewiseConstant {
 public:
  PiecewiseConstant() = default;
  PiecewiseConstant(Rational mesh_step, long start_cell, size_t dim, size_t cell_count)
      : mesh_step_(std::move(mesh_step)), start_cell_(start_cell), dim_(dim),
        values_(cell_count, std::vector<T>(dim, T(0))) {
    if (mesh_step_ <= 0) throw Error(ErrorKind::kInvalidInput, "mesh step must be positive");
  }

  /// `start` must be an integer multiple of `mesh_step`.
  static PiecewiseConstant on_interval(const Rational& mesh_step, const Rational& start, size_t dim,
                                       size_t cell_count) {
    if (mesh_step <= 0) throw Error(ErrorKind::kInvalidInput, "mesh step must be positive");
    Rational k = start / mesh_step;
    if (k.get_den() != 1) throw Error(ErrorKind::kMeshMismatch, "start is not on the mesh");
    return PiecewiseConstant(mesh_step, k.get_num().get_si(), dim, cell_count);
  }

  const Rational& mesh_step() const { return mesh_step_; }
  long start_cell() const { return start_cell_; }
  long end_cell() const { return start_cell_ + static_cast<long>(values_.size()); }
  Rational start() const { return mesh_step_ * start_cell_; }
  size_t dim() const { return dim_; }
  size_t cell_count() const { return values_.size(); }

  std::vector<T>& cell(size_t i) { return values_.at(i); }
  const std::vector<T>& cell(size_t i) const { return values_.at(i); }

  /// Value on absolute cell index k; zero outside the stored domain.
  std::vector<T> at_cell(long k) const {
    if (k < start_cell_ || k >= end_cell()) return std::vector<T>(dim_, T(0));
    return values_[static_cast<size_t>(k - start_cell_)];
  }

  friend bool operator==(const PiecewiseConstant& a, const PiecewiseConstant& b) {
    return a.mesh_step_ == b.mesh_step_ && a.start_cell_ == b.start_cell_ && a.dim_ == b.dim_ &&
           a.values_ == b.values_;
  }

 private:
  Rational mesh_step_{1};
  long start_cell_ = 0;
  size_t dim_ = 1;
  std::vector<std::vector<T>> values_;
};

/// Zeroes every cell that starts before t = 0.
template <typename T>
PiecewiseConstant<T> truncate(const PiecewiseConstant<T>& f) {
  PiecewiseConstant<T> out = f;
  for (size_t i = 0; i < out.cell_count(); ++i)
    if (f.start_cell() + static_cast<long>(i) < 0) std::fill(out.cell(i).begin(), out.cell(i).end(), T(0));
  return out;
}

/// t -> sum_j h_j f(t + lambda_j). The result lives on
/// [start - max lag, end) with f taken as zero off its domain.
template <typename T>
PiecewiseConstant<T> convolve_measure_function(const DiracSumMeasure& m, const PiecewiseConstant<T>& f) {
  std::vector<std::pair<long, T>> shifts;
  long max_shift = 0;
  for (const auto& a : m.atoms()) {
    if (!a.lag.is_rational()) throw Error(ErrorKind::kMeshMismatch, "lag " + a.lag.str() + " is not rational");
    Rational k = a.lag.rational_value() / f.mesh_step();
    if (k.get_den() != 1)
      throw Error(ErrorKind::kMeshMismatch, "lag " + a.lag.str() + " is not a multiple of the mesh step");
    long shift = k.get_num().get_si();
    max_shift = std::max(max_shift, shift);
    shifts.emplace_back(shift, scalar_cast<T>(a.weight));
  }
  PiecewiseConstant<T> out(f.mesh_step(), f.start_cell() - max_shift, f.dim(),
                           f.cell_count() + static_cast<size_t>(max_shift));
  for (size_t i = 0; i < out.cell_count(); ++i) {
    long k = out.start_cell() + static_cast<long>(i);
    auto& cell = out.cell(i);
    for (const auto& [shift, w] : shifts) {
      auto v = f.at_cell(k + shift);
      for (size_t c = 0; c < cell.size(); ++c) cell[c] += w * v[c];
    }
  }
  return out;
}

}  // namespace lcdde
