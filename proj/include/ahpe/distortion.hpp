#pragma once

#include "ahpe/manifold.hpp"

namespace ahpe {

struct DistortionRate {
  double delta = 1.0;
  double source_distance = 0.0;
};

// max{1 + 4(a coth a - 1), (sinh(2a)/(2a))^2} with a = sqrt(K) r.
double t_rate(double K, double r);
// cosh a - sinh(a)/a with a = sqrt(K) r.
double s_rate(double K, double r);

DistortionRate valid_rate(const Manifold& m, const Point& w, const Point& z);

struct IdentitySides {
  double lhs = 0.0;
  double rhs = 0.0;
};

// p|x|^2 + q|y|^2 versus (p+q)|(px+qy)/(p+q)|^2 + pq/(p+q)|x-y|^2.
IdentitySides interpolation_identity(double p, double q, const Vec& x,
                                     const Vec& y);

}  // namespace ahpe
