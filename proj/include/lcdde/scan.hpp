#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <thread>
#include <vector>

#include "lcdde/error.hpp"

namespace lcdde {

struct SigmaWindow {
  double lo = -5.0;
  double hi = 5.0;
};

/// Resolution of a sigma x torus scan. `n_torus` points per torus axis.
struct ScanGrid {
  int n_sigma = 41;
  int n_torus = 0;  // 0 picks a default from the torus dimension
  int refine_passes = 1;
  bool half_torus = false;  // scan only one representative of each conjugate pair
  int workers = 1;
};

/// A point of R x T^q; angles in radians, wrapped to (-pi, pi].
struct ScanPoint {
  double sigma = 0.0;
  std::vector<double> angles;
};

struct ScanRow {
  double sigma;
  std::vector<double> angles;
  double value;
};

struct ScanResult {
  double grid_min = std::numeric_limits<double>::infinity();
  ScanPoint grid_argmin;
  double refined_min = std::numeric_limits<double>::infinity();
  ScanPoint refined_argmin;
  size_t evaluations = 0;
};

inline int default_torus_resolution(size_t q) {
  if (q <= 1) return 64;
  if (q == 2) return 32;
  return 16;
}

namespace detail {

inline double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  a = std::fmod(a, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  if (a > std::numbers::pi) a -= kTwoPi;
  return a;
}

// Angle of torus grid index j out of n. Conjugate indices j and n - j give
// bitwise negated angles.
inline double grid_angle(long j, long n) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  if (2 * j <= n) return kTwoPi * static_cast<double>(j) / static_cast<double>(n);
  return -(kTwoPi * static_cast<double>(n - j) / static_cast<double>(n));
}

// Representative of {theta, -theta}: the first angle that is neither 0 nor pi
// is made positive.
inline std::vector<double> canonical_angles(std::vector<double> angles) {
  for (double a : angles) {
    if (a == 0.0 || a == std::numbers::pi) continue;
    if (a < 0.0)
      for (double& b : angles) b = (b == std::numbers::pi) ? b : -b;
    break;
  }
  return angles;
}

}  // namespace detail

/// Unit complex numbers e^{i theta}, built from |theta| so that conjugate
/// angles give bitwise conjugate values.
inline std::vector<std::complex<double>> torus_point(const std::vector<double>& angles) {
  std::vector<std::complex<double>> z;
  z.reserve(angles.size());
  for (double a : angles) {
    double m = std::abs(a);
    double im = std::sin(m);
    z.emplace_back(std::cos(m), a < 0.0 ? -im : im);
  }
  return z;
}

/// Minimizes a conjugation-symmetric objective f(sigma, angles) over a
/// sigma grid times a uniform torus grid, then polishes by compass search
/// from the argmin of each nested sub-grid, so refining either axis (sigma
/// n -> 2n - 1, torus n -> 2n) never raises `refined_min`. The objective is always evaluated at the canonical member
/// of each conjugate pair, so half and full torus scans agree exactly. The
/// grid reduction breaks ties by the lexicographic (sigma, angle) index, so
/// the result does not depend on the worker count.
template <typename Objective>
ScanResult scan_sigma_torus(const Objective& f, size_t q, const SigmaWindow& window, const ScanGrid& grid,
                            std::vector<ScanRow>* rows = nullptr) {
  if (!(window.lo < window.hi) || !std::isfinite(window.lo) || !std::isfinite(window.hi))
    throw Error(ErrorKind::kInvalidInput, "empty or non-finite sigma window");
  const long n_t = grid.n_torus > 0 ? grid.n_torus : default_torus_resolution(q);
  if (grid.n_sigma < 2 || n_t < 2) throw Error(ErrorKind::kInvalidInput, "grid resolutions must be >= 2");
  const long n_s = grid.n_sigma;
  const long first_axis = q == 0 ? 1 : (grid.half_torus ? n_t / 2 + 1 : n_t);
  long torus_count = q == 0 ? 1 : first_axis;
  for (size_t k = 1; k < q; ++k) torus_count *= n_t;
  const long total = n_s * torus_count;
  const double d_sigma = (window.hi - window.lo) / static_cast<double>(n_s - 1);

  auto point_of = [&](long index) {
    ScanPoint p;
    long t = index % torus_count;
    long i = index / torus_count;
    p.sigma = i == n_s - 1 ? window.hi : window.lo + static_cast<double>(i) * d_sigma;
    p.angles.assign(q, 0.0);
    for (size_t k = q; k-- > 0;) {
      long axis = k == 0 ? first_axis : n_t;
      p.angles[k] = detail::grid_angle(t % axis, n_t);
      t /= axis;
    }
    return p;
  };
  auto value_at = [&](const ScanPoint& p) {
    double v = f(p.sigma, detail::canonical_angles(p.angles));
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  // Nested sub-grids: sigma level a keeps every 2^a-th sigma index (n -> (n+1)/2
  // while n is odd), torus level b every 2^b-th angle index (n -> n/2 while n is
  // even). A coarser scan is exactly one of these sub-grids, bit for bit.
  int sigma_levels = 1, torus_levels = 1;
  for (long n = n_s; n % 2 == 1 && n >= 3; n = (n + 1) / 2) ++sigma_levels;
  if (q > 0)
    for (long n = n_t; n % 2 == 0 && n >= 4; n /= 2) ++torus_levels;
  const size_t level_count = static_cast<size_t>(sigma_levels * torus_levels);

  auto trailing_level = [](long j, int cap) {
    int a = 0;
    while (a + 1 < cap && j != 0 && j % 2 == 0) {
      j /= 2;
      ++a;
    }
    return j == 0 ? cap - 1 : a;
  };

  struct Best {
    double value = std::numeric_limits<double>::infinity();
    long index = -1;
  };
  using Table = std::vector<Best>;  // indexed a * torus_levels + b
  auto record = [&](Table& table, long idx, double v) {
    long t = idx % torus_count;
    int a_max = trailing_level(idx / torus_count, sigma_levels);
    int b_max = torus_levels - 1;
    for (size_t k = q; k-- > 0;) {
      long axis = k == 0 ? first_axis : n_t;
      b_max = std::min(b_max, trailing_level(t % axis, torus_levels));
      t /= axis;
    }
    for (int a = 0; a <= a_max; ++a)
      for (int b = 0; b <= b_max; ++b) {
        Best& cell = table[static_cast<size_t>(a * torus_levels + b)];
        if (v < cell.value || cell.index < 0) cell = {v, idx};
      }
  };
  auto scan_range = [&](long begin, long end) {
    Table table(level_count);
    for (long idx = begin; idx < end; ++idx) record(table, idx, value_at(point_of(idx)));
    return table;
  };

  ScanResult out;
  Table best(level_count);
  if (rows != nullptr) {
    rows->clear();
    rows->reserve(static_cast<size_t>(total));
    for (long idx = 0; idx < total; ++idx) {
      ScanPoint p = point_of(idx);
      double v = value_at(p);
      rows->push_back({p.sigma, p.angles, v});
      record(best, idx, v);
    }
  } else {
    const long workers = std::max<long>(1, std::min<long>(grid.workers, total));
    std::vector<Table> partial(static_cast<size_t>(workers));
    if (workers == 1) {
      partial[0] = scan_range(0, total);
    } else {
      std::vector<std::thread> pool;
      for (long w = 0; w < workers; ++w) {
        long begin = total * w / workers, end = total * (w + 1) / workers;
        pool.emplace_back([&, w, begin, end] { partial[static_cast<size_t>(w)] = scan_range(begin, end); });
      }
      for (auto& t : pool) t.join();
    }
    for (const auto& table : partial)
      for (size_t l = 0; l < level_count; ++l)
        if (table[l].index >= 0 && (best[l].index < 0 || table[l].value < best[l].value)) best[l] = table[l];
  }
  out.evaluations = static_cast<size_t>(total);
  out.grid_min = best[0].value;
  out.grid_argmin = point_of(best[0].index);
  out.refined_min = out.grid_min;
  out.refined_argmin = out.grid_argmin;

  // Compass search from the argmin of every sub-grid, with that sub-grid's
  // spacing as the initial step; sigma stays inside the window.
  const double d_angle = 2.0 * std::numbers::pi / static_cast<double>(n_t);
  for (int a = 0; a < sigma_levels; ++a) {
    for (int b = 0; b < torus_levels; ++b) {
      const Best& start = best[static_cast<size_t>(a * torus_levels + b)];
      ScanPoint x = point_of(start.index);
      double fx = start.value;
      for (int pass = 0; pass < grid.refine_passes; ++pass) {
        double step_sigma = std::ldexp(d_sigma, a), step_angle = std::ldexp(d_angle, b);
        for (int iter = 0; iter < 20000 && (step_sigma > 1e-14 || step_angle > 1e-14); ++iter) {
          bool improved = false;
          for (size_t c = 0; c <= q && !improved; ++c) {
            for (int sign : {+1, -1}) {
              ScanPoint y = x;
              if (c == 0) {
                y.sigma = std::clamp(x.sigma + sign * step_sigma, window.lo, window.hi);
              } else {
                y.angles[c - 1] = detail::wrap_angle(x.angles[c - 1] + sign * step_angle);
              }
              double fy = value_at(y);
              ++out.evaluations;
              if (fy < fx) {
                x = std::move(y);
                fx = fy;
                improved = true;
                break;
              }
            }
          }
          if (!improved) {
            step_sigma *= 0.5;
            step_angle *= 0.5;
          }
        }
      }
      if (fx < out.refined_min) {
        out.refined_min = fx;
        out.refined_argmin = x;
      }
    }
  }
  return out;
}

}  // namespace lcdde
