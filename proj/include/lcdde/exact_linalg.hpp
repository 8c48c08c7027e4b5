#pragma once

#include <Eigen/Dense>

#include <optional>
#include <utility>
#include <vector>

#include "lcdde/error.hpp"
#include "lcdde/rational.hpp"

namespace lcdde {

/// Dense row-major matrix over Q.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

  static RationalMatrix identity(size_t n) {
    RationalMatrix m(n, n);
    for (size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  Rational& operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }

  bool is_zero() const {
    for (const auto& x : data_)
      if (x != 0) return false;
    return true;
  }

  RationalMatrix transpose() const {
    RationalMatrix t(cols_, rows_);
    for (size_t r = 0; r < rows_; ++r)
      for (size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  Eigen::MatrixXd to_double() const {
    Eigen::MatrixXd m(rows_, cols_);
    for (size_t r = 0; r < rows_; ++r)
      for (size_t c = 0; c < cols_; ++c) m(r, c) = (*this)(r, c).get_d();
    return m;
  }

  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.cols_ != b.rows_) throw Error(ErrorKind::kInvalidInput, "matrix product dimension mismatch");
    RationalMatrix out(a.rows_, b.cols_);
    for (size_t i = 0; i < a.rows_; ++i)
      for (size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k) == 0) continue;
        for (size_t j = 0; j < b.cols_; ++j) out(i, j) += a(i, k) * b(k, j);
      }
    return out;
  }

  std::vector<Rational> operator*(const std::vector<Rational>& v) const {
    if (v.size() != cols_) throw Error(ErrorKind::kInvalidInput, "matrix-vector dimension mismatch");
    std::vector<Rational> out(rows_, Rational(0));
    for (size_t i = 0; i < rows_; ++i)
      for (size_t j = 0; j < cols_; ++j)
        if (v[j] != 0) out[i] += (*this)(i, j) * v[j];
    return out;
  }

  friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<Rational> data_;
};

struct RowEchelon {
  RationalMatrix reduced;            // reduced row echelon form
  std::vector<size_t> pivot_columns;
  size_t rank() const { return pivot_columns.size(); }
};

/// Gauss-Jordan elimination over Q (first nonzero pivot, exact).
inline RowEchelon row_reduce(RationalMatrix m) {
  RowEchelon out;
  size_t row = 0;
  for (size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    size_t pivot = row;
    while (pivot < m.rows() && m(pivot, col) == 0) ++pivot;
    if (pivot == m.rows()) continue;
    if (pivot != row)
      for (size_t c = 0; c < m.cols(); ++c) std::swap(m(pivot, c), m(row, c));
    Rational inv = 1 / m(row, col);
    for (size_t c = col; c < m.cols(); ++c) m(row, c) *= inv;
    for (size_t r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, col) == 0) continue;
      Rational factor = m(r, col);
      for (size_t c = col; c < m.cols(); ++c) m(r, c) -= factor * m(row, c);
    }
    out.pivot_columns.push_back(col);
    ++row;
  }
  out.reduced = std::move(m);
  return out;
}

inline size_t exact_rank(const RationalMatrix& m) { return row_reduce(m).rank(); }

/// Minimum-norm exact solution of M u = b, or a left null vector w with
/// w^T M = 0 and w . b != 0 proving inconsistency.
struct ExactSolve {
  std::optional<std::vector<Rational>> solution;
  std::optional<std::vector<Rational>> left_null_certificate;
};

inline ExactSolve solve_min_norm(const RationalMatrix& m, const std::vector<Rational>& b) {
  if (b.size() != m.rows()) throw Error(ErrorKind::kInvalidInput, "right-hand side has the wrong length");
  const size_t rows = m.rows(), cols = m.cols();
  // Row-reduce [M | I]; rows whose M part vanishes carry left null vectors.
  RationalMatrix aug(rows, cols + rows);
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < cols; ++c) aug(r, c) = m(r, c);
    aug(r, cols + r) = 1;
  }
  RowEchelon ech = row_reduce(aug);
  size_t rank = 0;
  while (rank < ech.pivot_columns.size() && ech.pivot_columns[rank] < cols) ++rank;

  ExactSolve out;
  for (size_t r = rank; r < rows; ++r) {
    Rational dot(0);
    std::vector<Rational> w(rows);
    for (size_t i = 0; i < rows; ++i) {
      w[i] = ech.reduced(r, cols + i);
      dot += w[i] * b[i];
    }
    if (dot != 0) {
      out.left_null_certificate = std::move(w);
      return out;
    }
  }

  // Consistent: u = M_I^T y with (M_I M_I^T) y = b_I over a maximal
  // independent row set I, which is the minimum-norm solution.
  RowEchelon row_space = row_reduce(m.transpose());
  const auto& independent = row_space.pivot_columns;
  const size_t k = independent.size();
  std::vector<Rational> u(cols, Rational(0));
  if (k == 0) {
    out.solution = std::move(u);
    return out;
  }
  RationalMatrix gram(k, k + 1);
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = 0; j < k; ++j) {
      Rational acc(0);
      for (size_t c = 0; c < cols; ++c) acc += m(independent[i], c) * m(independent[j], c);
      gram(i, j) = acc;
    }
    gram(i, k) = b[independent[i]];
  }
  RowEchelon g = row_reduce(gram);
  for (size_t i = 0; i < k; ++i) {
    const Rational& y = g.reduced(i, k);
    if (y == 0) continue;
    for (size_t c = 0; c < cols; ++c) u[c] += y * m(independent[i], c);
  }
  out.solution = std::move(u);
  return out;
}

}  // namespace lcdde
