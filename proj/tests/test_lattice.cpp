#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lcdde/lattice.hpp"
#include "test_util.hpp"

using namespace lcdde;
using fixture::measure;
using fixture::q;

namespace {

GeneratorTable irrational_table() {
  GeneratorTable t;
  t.declare("sqrt2", std::sqrt(2.0));
  t.declare("sqrt3", std::sqrt(3.0));
  return t;
}

std::vector<LagExpr> lags(const std::vector<std::string>& texts, const GeneratorTable& table) {
  std::vector<LagExpr> out;
  for (const auto& t : texts) out.push_back(parse_lag(t, &table));
  return out;
}

// Oracle: r = gcd(numerators) / lcm(denominators) over the rational lags.
Rational gcd_lcm_step(const std::vector<Rational>& values) {
  Integer num = 0, den = 1;
  for (const auto& v : values) {
    num = gcd(num, v.get_num());
    den = lcm(den, v.get_den());
  }
  return Rational(num, den);
}

}  // namespace

TEST(ParseLag, Forms) {
  GeneratorTable t = irrational_table();
  EXPECT_EQ(parse_lag("3/2"), LagExpr(q("3/2")));
  EXPECT_EQ(parse_lag("3/2 * sqrt2", &t), LagExpr("sqrt2", q("3/2")));
  EXPECT_EQ(parse_lag("1 + 2*sqrt3", &t), LagExpr(Rational(1)) + LagExpr("sqrt3", Rational(2)));
  EXPECT_THROW(parse_lag("sqrt5", &t), Error);
  EXPECT_THROW(parse_lag("-1"), Error);
}

TEST(BuildLattice, SpecExamples) {
  const auto& table = rational_generators();
  auto dec = build_lattice(lags({"1", "3/2"}, table), table);
  ASSERT_EQ(dec.q(), 1u);
  EXPECT_EQ(dec.basis()[0].rational_scale, Rational(1, 2));
  EXPECT_EQ(dec.exponents_of(LagExpr(Rational(1))), std::vector<long>{2});
  EXPECT_EQ(dec.exponents_of(LagExpr(q("3/2"))), std::vector<long>{3});
  EXPECT_EQ(dec.basis()[0].rational_scale, gcd_lcm_step({1, q("3/2")}));

  GeneratorTable t = irrational_table();
  auto dec2 = build_lattice(lags({"1", "sqrt2"}, t), t);
  ASSERT_EQ(dec2.q(), 2u);
  EXPECT_EQ(dec2.exponents_of(LagExpr(Rational(1))), (std::vector<long>{1, 0}));
  EXPECT_EQ(dec2.exponents_of(parse_lag("sqrt2", &t)), (std::vector<long>{0, 1}));

  auto dec3 = build_lattice(lags({"1/3", "1/2", "1"}, table), table);
  EXPECT_EQ(dec3.basis()[0].rational_scale, Rational(1, 6));
  EXPECT_EQ(dec3.exponents_of(LagExpr(q("1/3"))), std::vector<long>{2});
  EXPECT_EQ(dec3.exponents_of(LagExpr(q("1/2"))), std::vector<long>{3});
  EXPECT_EQ(dec3.exponents_of(LagExpr(Rational(1))), std::vector<long>{6});
}

TEST(BuildLattice, Errors) {
  try {
    build_lattice(std::vector<LagExpr>{}, rational_generators());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidInput);
  }
  try {
    LagExpr(Rational(-1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidLag);
  }
}

TEST(BuildLattice, ReconstructionCanonicalityRandom) {
  GeneratorTable t = irrational_table();
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<int> num(0, 12), den(1, 6), pick(0, 2);
  const std::vector<std::string> labels = {kUnitLabel, "sqrt2", "sqrt3"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<LagExpr> input;
    for (int i = 0; i < 5; ++i) {
      LagExpr lag;
      for (int k = 0; k < 2; ++k) {
        Rational c(num(rng), den(rng));
        c.canonicalize();
        if (c != 0) lag += LagExpr(labels[static_cast<size_t>(pick(rng))], c);
      }
      if (lag.is_zero()) lag = LagExpr(Rational(1));
      input.push_back(lag);
    }
    auto dec = build_lattice(input, t);
    EXPECT_EQ(dec, build_lattice(input, t));
    for (const auto& lag : input) {
      auto row = dec.exponents_of(lag);
      for (long e : row) EXPECT_GE(e, 0);
      EXPECT_EQ(dec.reconstruct(row), lag);
    }
    // Column gcd is 1 for every used generator.
    for (size_t k = 0; k < dec.q(); ++k) {
      Integer g = 0;
      for (const auto& row : dec.exponents()) g = gcd(g, Integer(row[k]));
      EXPECT_EQ(g, 1);
    }
  }
}

TEST(Kronecker, SpecExamples) {
  auto r = kronecker_approximate({1.0}, {0.25}, 1e-6);
  EXPECT_NEAR(r.beta, 0.25, 1e-6);
  EXPECT_EQ(r.offsets, std::vector<long>{0});

  auto z = kronecker_approximate({1.0, std::sqrt(2.0)}, {0.0, 0.0}, 1e-3);
  EXPECT_EQ(z.beta, 0.0);
  EXPECT_EQ(z.offsets, (std::vector<long>{0, 0}));
}

TEST(Kronecker, AgreesWithBruteForceGrid) {
  const std::vector<double> gens = {1.0, std::sqrt(2.0)}, targets = {0.0, 0.5};
  const double eps = 0.05;
  auto res = kronecker_approximate(gens, targets, eps);
  auto error = [&](double beta) {
    double e = 0.0;
    for (size_t j = 0; j < gens.size(); ++j) {
      double x = beta * gens[j] - targets[j];
      e = std::max(e, std::abs(x - std::nearbyint(x)));
    }
    return e;
  };
  EXPECT_LE(res.epsilon, eps);
  EXPECT_LE(error(res.beta), eps + 1e-12);
  for (size_t j = 0; j < gens.size(); ++j)
    EXPECT_LE(std::abs(res.beta * gens[j] - targets[j] - static_cast<double>(res.offsets[j])), eps + 1e-12);
  // Oracle 1: exhaustive scan over [0, 200] at step 1e-3 confirms a solution exists.
  double first_hit = -1.0;
  for (long i = 0; i <= 200000; ++i) {
    double beta = static_cast<double>(i) * 1e-3;
    if (error(beta) <= eps) {
      first_hit = beta;
      break;
    }
  }
  ASSERT_GE(first_hit, 0.0);
  // Oracle 2: walking the search grid i * eps / (10 max r) outward from 0,
  // the first index meeting the bound (positive side first on ties) is the result.
  const double step = eps / (10.0 * std::sqrt(2.0));
  double expected = NAN;
  for (long i = 0; std::isnan(expected); ++i) {
    if (error(static_cast<double>(i) * step) <= eps) expected = static_cast<double>(i) * step;
    else if (error(-static_cast<double>(i) * step) <= eps) expected = -static_cast<double>(i) * step;
  }
  EXPECT_EQ(res.beta, expected);
  EXPECT_LE(std::abs(res.beta), first_hit + step);
}

TEST(Kronecker, RefiningEpsilonStaysWithinRequest) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> phase(0.0, 1.0);
  const std::vector<double> gens = {1.0, std::sqrt(2.0)};
  for (int t = 0; t < 10; ++t) {
    std::vector<double> targets = {phase(rng), phase(rng)};
    double prev_request = INFINITY;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      auto r = kronecker_approximate(gens, targets, eps);
      EXPECT_LE(r.epsilon, eps);
      EXPECT_LE(r.epsilon, prev_request);
      prev_request = eps;
    }
  }
}

TEST(Kronecker, BudgetExceeded) {
  try {
    kronecker_approximate({1.0, std::sqrt(2.0), std::sqrt(3.0)}, {0.1, 0.7, 0.3}, 1e-9, KroneckerOptions{4.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kBudgetExceeded);
    EXPECT_NE(std::string(e.what()).find("best epsilon"), std::string::npos);
  }
}

TEST(MonomialRep, SpecExamples) {
  const auto& t = rational_generators();
  auto m1 = measure({{"0", "1"}, {"1", "-1"}});
  auto m2 = measure({{"1", "1"}, {"2", "1"}});
  auto dec = build_lattice(std::vector<DiracSumMeasure>{m1, m2}, t);
  EXPECT_EQ(univariate_polynomial(m1, dec), (RationalPolynomial{1, -1}));
  EXPECT_EQ(univariate_polynomial(m2, dec), (RationalPolynomial{0, 1, 1}));
  EXPECT_EQ(lift_polynomial(univariate_polynomial(m2, dec), dec), m2);
}

TEST(MonomialRep, PolynomialMatchesLaplace) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> re(-1.0, 1.0), im(-6.0, 6.0);
  for (int i = 0; i < 50; ++i) {
    auto m = fixture::random_measure(rng, 8, 3);
    auto dec = build_lattice(std::vector<DiracSumMeasure>{m}, rational_generators());
    auto p = univariate_polynomial(m, dec);
    const double r = dec.basis()[0].value;
    for (int k = 0; k < 10; ++k) {
      std::complex<double> s(re(rng), im(rng));
      auto lhs = p.eval(std::exp(s * r));
      auto rhs = laplace_eval(m, s);
      double scale = 0.0;
      for (const auto& a : m.atoms()) scale += std::abs(to_double(a.weight)) * std::exp(s.real() * to_double(a.lag.rational_value()));
      EXPECT_LE(std::abs(lhs - rhs), 1e-12 * (1.0 + scale));
    }
  }
}

TEST(MonomialRep, MissingLagIsDecompositionError) {
  auto dec = build_lattice(std::vector<LagExpr>{LagExpr(Rational(1))}, rational_generators());
  try {
    monomial_rep(measure({{"1/2", "1"}}), dec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDecompositionError);
  }
}
