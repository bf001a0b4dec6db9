#include "ahpe/distortion.hpp"

#include <algorithm>
#include <cmath>

#include "ahpe/errors.hpp"

namespace ahpe {

double t_rate(double K, double r) {
  if (K < 0 || r < 0) throw ContractViolation("t_rate: K and r must be nonnegative");
  const double a = std::sqrt(K) * r;
  if (a == 0.0) return 1.0;
  double coth_term, sinh_term;
  if (a < 1e-4) {
    const double a2 = a * a;
    coth_term = a2 / 3.0 - a2 * a2 / 45.0;  // a coth a - 1
    const double b2 = 4.0 * a2;
    const double s = 1.0 + b2 / 6.0 + b2 * b2 / 120.0;  // sinh(2a)/(2a)
    sinh_term = s * s;
  } else {
    coth_term = a / std::tanh(a) - 1.0;
    const double s = std::sinh(2.0 * a) / (2.0 * a);
    sinh_term = s * s;
  }
  return std::max(1.0 + 4.0 * coth_term, sinh_term);
}

double s_rate(double K, double r) {
  if (K < 0 || r < 0) throw ContractViolation("s_rate: K and r must be nonnegative");
  const double a = std::sqrt(K) * r;
  if (a < 1e-2) {
    // sum_{n>=1} 2n a^{2n} / (2n+1)!
    const double a2 = a * a;
    return a2 / 3.0 + a2 * a2 / 30.0 + a2 * a2 * a2 / 840.0;
  }
  return std::cosh(a) - std::sinh(a) / a;
}

DistortionRate valid_rate(const Manifold& m, const Point& w, const Point& z) {
  const double d = m.distance(w, z);
  return {t_rate(m.curvature(), d), d};
}

IdentitySides interpolation_identity(double p, double q, const Vec& x,
                                     const Vec& y) {
  if (!(p + q > 0))
    throw ContractViolation("interpolation_identity: p + q must be positive");
  const double s = p + q;
  IdentitySides out;
  out.lhs = p * x.squaredNorm() + q * y.squaredNorm();
  out.rhs = s * ((p * x + q * y) / s).squaredNorm() + (p * q / s) * (x - y).squaredNorm();
  return out;
}

}  // namespace ahpe
