#pragma once

#include <vector>

#include "lcdde/corona.hpp"
#include "lcdde/error.hpp"
#include "lcdde/lattice.hpp"
#include "lcdde/measure.hpp"
#include "lcdde/polynomial.hpp"

namespace lcdde {

struct BezoutCertificate {
  std::vector<DiracSumMeasure> cofactors;  // g_1..g_K
  DiracSumMeasure residual;                // sum_i f_i * g_i, equal to delta_0
  bool verified = false;
};

/// Raised when the instance has a nonconstant gcd; carries it as evidence.
class CoronaViolated : public Error {
 public:
  explicit CoronaViolated(RationalPolynomial gcd)
      : Error(ErrorKind::kCoronaViolated, "common factor " + gcd.str()), gcd_(std::move(gcd)) {}
  const RationalPolynomial& gcd() const { return gcd_; }

 private:
  RationalPolynomial gcd_;
};

/// Exact cofactors g_i with sum_i f_i * g_i = delta_0 for commensurable
/// instances, lifted from polynomial extended Euclid in x = e^{s r}.
inline BezoutCertificate measure_bezout(const CoronaInstance& inst) {
  if (inst.q() != 1)
    throw Error(ErrorKind::kUnsupportedCase,
                "Bezout factors are only constructed for commensurable lags; the incommensurable case has "
                "an existence proof only");
  const auto& dec = inst.decomposition();
  std::vector<RationalPolynomial> polys;
  for (const auto& m : inst.measures()) polys.push_back(univariate_polynomial(m, dec));
  PolyBezoutResult pb = poly_bezout(polys);
  if (!pb.coprime) throw CoronaViolated(pb.gcd);

  BezoutCertificate cert;
  for (const auto& g : pb.cofactors) cert.cofactors.push_back(lift_polynomial(g, dec));
  for (size_t i = 0; i < cert.cofactors.size(); ++i)
    cert.residual = cert.residual + convolve(inst.measures()[i], cert.cofactors[i]);
  cert.verified = cert.residual == DiracSumMeasure::unit();
  return cert;
}

}  // namespace lcdde
