#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lcdde/hautus.hpp"
#include "test_util.hpp"

using namespace lcdde;
using fixture::matrix;
using fixture::scalar_system;
using fixture::system;

TEST(HEval, SpecExamples) {
  auto zero = system(2, 1, {"1", "2"}, {RationalMatrix(2, 2), RationalMatrix(2, 2)}, matrix({{"1"}, {"0"}}));
  EXPECT_LT((h_eval(zero, {0.3, 2.0}) - Eigen::MatrixXcd::Identity(2, 2)).norm(), 1e-15);
  EXPECT_LT(std::abs(h_eval(scalar_system("1", "1"), 0.0)(0, 0)), 1e-15);
  EXPECT_LT(std::abs(h_eval(scalar_system("1/2", "1"), -std::log(2.0))(0, 0)), 1e-15);
}

TEST(CondII, SpecExamples) {
  auto identity = system(2, 1, {"1"}, {RationalMatrix::identity(2)}, matrix({{"0"}, {"0"}}));
  EXPECT_EQ(cond_ii_check(identity).verdict, Verdict::kPass);

  auto deficient = system(2, 1, {"1"}, {RationalMatrix(2, 2)}, matrix({{"1"}, {"0"}}));
  auto r = cond_ii_check(deficient);
  EXPECT_EQ(r.verdict, Verdict::kFail);
  EXPECT_EQ(r.rank, 1u);

  auto diag = system(2, 1, {"1"}, {matrix({{"1", "0"}, {"0", "0"}})}, matrix({{"0"}, {"1"}}));
  auto r2 = cond_ii_check(diag);
  EXPECT_EQ(r2.verdict, Verdict::kPass);
  EXPECT_EQ(r2.rank, 2u);
}

TEST(CondI, ScalarPassMatchesClosedForm) {
  auto spec = scalar_system("1/2", "1");
  auto res = cond_i_scan(spec, default_hautus_window(spec), default_hautus_grid());
  EXPECT_EQ(res.verdict, Verdict::kPass);
  // sqrt(|1 - w/2|^2 + 1) >= 1 with equality at w = 2 (sigma = -ln 2, z = 1).
  EXPECT_GE(res.min_sigma_min, 1.0 - 1e-12);
  EXPECT_NEAR(res.min_sigma_min, 1.0, 1e-6);
  std::vector<ScanRow> rows;
  cond_i_scan(spec, default_hautus_window(spec), default_hautus_grid(), {}, &rows);
  for (const auto& row : rows) {
    std::complex<double> w = std::exp(-row.sigma) * std::polar(1.0, row.angles[0]);
    EXPECT_NEAR(row.value, std::sqrt(std::norm(1.0 - 0.5 * w) + 1.0), 1e-12);
  }
}

TEST(CondI, ScalarZeroInputFailsAtMinusLnTwo) {
  auto spec = scalar_system("1/2", "0");
  auto res = cond_i_scan(spec, default_hautus_window(spec), default_hautus_grid());
  EXPECT_EQ(res.verdict, Verdict::kFail);
  EXPECT_NEAR(res.argmin_sigma, -std::log(2.0), 1e-6);
  EXPECT_LT(res.min_sigma_min, res.fail_threshold);
}

TEST(CondI, ZeroDynamicsPass) {
  auto spec = system(2, 2, {"1"}, {RationalMatrix(2, 2)}, matrix({{"1", "0"}, {"0", "1"}}));
  auto res = cond_i_scan(spec, default_hautus_window(spec), default_hautus_grid());
  EXPECT_EQ(res.verdict, Verdict::kPass);
  EXPECT_GE(res.min_sigma_min, 1.0 - 1e-12);
  EXPECT_NEAR(res.min_sigma_min, res.plus_infinity_sigma_min, 1e-12);
}

TEST(CondI, InvalidWindowOrGrid) {
  auto spec = scalar_system("1/2", "1");
  EXPECT_THROW(cond_i_scan(spec, SigmaWindow{2.0, -2.0}, default_hautus_grid()), Error);
  ScanGrid g = default_hautus_grid();
  g.n_torus = 1;
  EXPECT_THROW(cond_i_scan(spec, SigmaWindow{-2.0, 2.0}, g), Error);
}

TEST(HautusDecide, SpecExamples) {
  EXPECT_EQ(hautus_decide(scalar_system("1/2", "1")).overall, Verdict::kPass);
  auto no_input = hautus_decide(scalar_system("1/2", "0"));
  EXPECT_EQ(no_input.overall, Verdict::kFail);
  EXPECT_EQ(no_input.cond_i.verdict, Verdict::kFail);
  // [A_N, B] = [1/2, 0] has rank 1 = d, so cond ii passes here.
  EXPECT_EQ(no_input.cond_ii.verdict, Verdict::kPass);

  auto two = system(2, 1, {"1"}, {RationalMatrix(2, 2)}, matrix({{"1"}, {"0"}}));
  auto rep = hautus_decide(two);
  EXPECT_EQ(rep.cond_ii.verdict, Verdict::kFail);
  EXPECT_EQ(rep.overall, Verdict::kFail);
}

TEST(HautusDecide, TorusRankDrop) {
  // A = diag(1, 0), B = e2: [H, B] = [[1 - w, 0, 0], [0, 1, 1]] loses rank at w = 1.
  auto spec = system(2, 1, {"1"}, {matrix({{"1", "0"}, {"0", "0"}})}, matrix({{"0"}, {"1"}}));
  auto rep = hautus_decide(spec);
  EXPECT_EQ(rep.cond_ii.verdict, Verdict::kPass);
  EXPECT_EQ(rep.cond_i.verdict, Verdict::kFail);
  EXPECT_NEAR(rep.cond_i.argmin_sigma, 0.0, 1e-6);
}

TEST(HautusDecide, SimilarityInvariance) {
  std::mt19937_64 rng(53);
  std::uniform_int_distribution<int> entry(-3, 3);
  const std::vector<SystemSpec> specs = {
      system(2, 1, {"1", "2"}, {matrix({{"1/2", "0"}, {"1", "0"}}), matrix({{"0", "1/3"}, {"0", "1"}})}, matrix({{"1"}, {"0"}})),
      system(2, 1, {"1"}, {matrix({{"1", "0"}, {"0", "0"}})}, matrix({{"0"}, {"1"}})),
      system(2, 1, {"1"}, {RationalMatrix(2, 2)}, matrix({{"1"}, {"0"}})),
  };
  for (const auto& spec : specs) {
    auto base = hautus_decide(spec);
    for (int t = 0; t < 3; ++t) {
      // P = [[1, k], [0, 1]] has inverse [[1, -k], [0, 1]].
      Rational k(entry(rng));
      RationalMatrix p = RationalMatrix::identity(2), pinv = RationalMatrix::identity(2);
      p(0, 1) = k;
      pinv(0, 1) = -k;
      SystemSpec moved = spec;
      for (auto& aj : moved.a) aj = p * aj * pinv;
      moved.b = p * spec.b;
      auto rep = hautus_decide(moved);
      EXPECT_EQ(rep.overall, base.overall);
      EXPECT_EQ(rep.cond_i.verdict, base.cond_i.verdict);
      EXPECT_EQ(rep.cond_ii.verdict, base.cond_ii.verdict);
    }
  }
}

TEST(HautusDecide, HalfTorusAndEndpointConsistency) {
  std::mt19937_64 rng(59);
  std::uniform_int_distribution<int> entry(-2, 2);
  for (int t = 0; t < 10; ++t) {
    RationalMatrix a1(2, 2), a2(2, 2), b(2, 1);
    for (size_t i = 0; i < 2; ++i) {
      for (size_t j = 0; j < 2; ++j) {
        a1(i, j) = fixture::frac(entry(rng), 2);
        a2(i, j) = fixture::frac(entry(rng), 2);
      }
      b(i, 0) = entry(rng);
    }
    auto spec = system(2, 1, {"1", "2"}, {a1, a2}, b);
    ScanGrid full = default_hautus_grid(), half = default_hautus_grid();
    half.half_torus = true;
    auto w = default_hautus_window(spec);
    auto r1 = cond_i_scan(spec, w, full), r2 = cond_i_scan(spec, w, half);
    EXPECT_EQ(r1.grid_min, r2.grid_min);
    EXPECT_EQ(r1.min_sigma_min, r2.min_sigma_min);
    EXPECT_EQ(r1.minus_infinity_pass, cond_ii_check(spec).verdict == Verdict::kPass);
  }
}

TEST(HautusDecide, IncommensurableDelays) {
  SystemSpec spec = scalar_system("1/2", "1");
  spec.generators.declare("sqrt2", std::sqrt(2.0));
  spec.delays = {LagExpr(Rational(1)), parse_lag("sqrt2", &spec.generators)};
  spec.a = {matrix({{"1/4"}}), matrix({{"1/4"}})};
  auto rep = hautus_decide(spec);
  EXPECT_EQ(rep.overall, Verdict::kPass);
  // [H, 1] always has sigma_min >= 1 in the scalar case with B = 1.
  EXPECT_GE(rep.cond_i.min_sigma_min, 1.0 - 1e-12);
}
