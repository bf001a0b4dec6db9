#pragma once

#include <functional>
#include <string>

#include "ahpe/objectives.hpp"

namespace ahpe {

struct IproxCertificate {
  Point x;
  TangentVector v;       // at w
  Point w;
  TangentVector grad_w;  // gradient of f at w
  double eps = 0.0;
  double lhs_residual = 0.0;
};

enum class StrategyKind { exact_quadratic, nesterov_grad, two_step_grad, raxgd, gen_raxgd };

std::string to_string(StrategyKind k);
StrategyKind strategy_from_string(const std::string& s);

// Proposes x given (y, w); gen_raxgd projects the proposal back toward w
// along the geodesic if it violates the offset constraint.
using OffsetRule =
    std::function<Point(const Manifold& m, const Point& y, const Point& w)>;

struct Strategy {
  StrategyKind kind = StrategyKind::nesterov_grad;
  double lambda = 0.0;
  double sigma = 0.5;
  OffsetRule offset;  // gen_raxgd only; empty means x = w
};

// Step-size bound of each strategy given (L, sigma). exact_quadratic has none.
double max_valid_lambda(StrategyKind k, double L, double mu, double sigma);
// Throws ValidationError naming the violated condition.
void check_strategy(const Objective& f, const Strategy& s);

double verify(const Objective& f, const Point& y, const IproxCertificate& c,
              double lambda, double mu);

IproxCertificate exact_quadratic(const Objective& f, const Point& y, double lambda);
IproxCertificate nesterov_grad(const Objective& f, const Point& y, double lambda,
                               double sigma);
IproxCertificate two_step_grad(const Objective& f, const Point& y, double lambda);
IproxCertificate raxgd(const Objective& f, const Point& y, double lambda, double sigma);
IproxCertificate gen_raxgd(const Objective& f, const Point& y, double lambda,
                           double sigma, const OffsetRule& offset = {});

IproxCertificate apply_strategy(const Objective& f, const Point& y, const Strategy& s);

// Largest allowed d(w,x)/d(y,x) for gen_raxgd.
double gen_raxgd_offset_ratio(double sigma, double mu_lambda);
// Offset rule moving a fixed fraction of d(y,w) in a seeded random direction.
OffsetRule random_offset_rule(double fraction, unsigned long long seed);

// ||v - mu log_w x - grad f(w)||.
double subgradient_gap(const Objective& f, const IproxCertificate& c);
// ||log_w x - log_w y + lambda v|| - sigma d_w(x,y).
double relative_error_gap(const Manifold& m, const Point& y, const IproxCertificate& c,
                          double lambda, double sigma);
// The defining inequality written with grad f(w) in place of v (flat only).
double verify_gradient_form(const Objective& f, const Point& y,
                            const IproxCertificate& c, double lambda, double mu);

// max_z f(x)+<v,z-x>+(mu/2)|x-z|^2-((1+lambda mu)/lambda) eps - f(z) over
// sampled z (and z = w), flat manifolds only.
double eps_subgradient_check(const Objective& f, const IproxCertificate& c,
                             double lambda, double mu, int samples, Rng& rng);

}  // namespace ahpe
