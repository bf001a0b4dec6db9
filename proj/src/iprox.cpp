#include "ahpe/iprox.hpp"

#include <algorithm>
#include <cmath>

#include "ahpe/errors.hpp"

namespace ahpe {

namespace {

constexpr double kTwoStepSigma = 0.75;

double sq(double v) { return v * v; }

double eps_for(const Manifold& m, const Point& w, const Point& x, const Point& y,
               double lambda, double mu, double sigma) {
  const double d = m.tangent_distance(w, x, y);
  const double s = 1.0 + lambda * mu;
  return sigma * sigma / (2.0 * s * s) * d * d;
}

IproxCertificate finish(const Objective& f, const Point& y, IproxCertificate c,
                        double lambda, double sigma) {
  c.eps = eps_for(f.manifold(), c.w, c.x, y, lambda, f.mu(), sigma);
  c.lhs_residual = verify(f, y, c, lambda, f.mu());
  return c;
}

TangentVector scaled(TangentVector v, double s) {
  v.vec *= s;
  return v;
}

}  // namespace

std::string to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::exact_quadratic: return "exact_quadratic";
    case StrategyKind::nesterov_grad: return "nesterov_grad";
    case StrategyKind::two_step_grad: return "two_step_grad";
    case StrategyKind::raxgd: return "raxgd";
    case StrategyKind::gen_raxgd: return "gen_raxgd";
  }
  return "unknown";
}

StrategyKind strategy_from_string(const std::string& s) {
  for (auto k : {StrategyKind::exact_quadratic, StrategyKind::nesterov_grad,
                 StrategyKind::two_step_grad, StrategyKind::raxgd, StrategyKind::gen_raxgd})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown strategy '" + s + "'");
}

double max_valid_lambda(StrategyKind k, double L, double, double sigma) {
  switch (k) {
    case StrategyKind::exact_quadratic: return INFINITY;
    case StrategyKind::nesterov_grad: return sigma * sigma / (2.0 * L);
    case StrategyKind::two_step_grad: return kTwoStepSigma * kTwoStepSigma / (2.0 * L);
    case StrategyKind::raxgd: return sigma / L;
    case StrategyKind::gen_raxgd: return sigma / (2.0 * L);
  }
  return 0.0;
}

void check_strategy(const Objective& f, const Strategy& s) {
  if (!(s.lambda > 0) || !std::isfinite(s.lambda))
    throw ValidationError("lambda must be positive and finite");
  if (s.kind != StrategyKind::exact_quadratic && s.kind != StrategyKind::two_step_grad &&
      !(s.sigma > 0 && s.sigma < 1))
    throw ValidationError("sigma must lie in (0,1)");
  const double L = f.L();
  const double lim = max_valid_lambda(s.kind, L, f.mu(), s.sigma);
  const double slack = 1.0 + 1e-12;
  switch (s.kind) {
    case StrategyKind::exact_quadratic:
      if (!f.euclidean_quadratic())
        throw ValidationError("exact_quadratic requires a euclidean quadratic objective");
      break;
    case StrategyKind::nesterov_grad:
      if (s.lambda > lim * slack)
        throw ValidationError("nesterov_grad requires lambda <= sigma^2/(2L)");
      break;
    case StrategyKind::two_step_grad:
      if (s.lambda > lim * slack)
        throw ValidationError("two_step_grad requires lambda <= (3/4)^2/(2L) = 9/(32L)");
      break;
    case StrategyKind::raxgd:
      if (s.lambda > lim * slack) throw ValidationError("raxgd requires lambda <= sigma/L");
      break;
    case StrategyKind::gen_raxgd:
      if (s.lambda > lim * slack)
        throw ValidationError("gen_raxgd requires lambda <= sigma/(2L)");
      break;
  }
}

double verify(const Objective& f, const Point& y, const IproxCertificate& c,
              double lambda, double mu) {
  const Manifold& m = f.manifold();
  const Vec lx = m.log_map(c.w, c.x).vec;
  const Vec ly = m.log_map(c.w, y).vec;
  const double s = 1.0 + lambda * mu;
  const double first = sq(m.norm_at(c.w, lx - ly + lambda * c.v.vec));
  const double second =
      f.value(c.x) - f.value(c.w) - m.dot(lx, c.v.vec) + 0.5 * mu * sq(m.norm_at(c.w, lx));
  return first / (2.0 * s * s) + lambda / s * second - c.eps;
}

double verify_gradient_form(const Objective& f, const Point& y,
                            const IproxCertificate& c, double lambda, double mu) {
  const Manifold& m = f.manifold();
  const Vec lx = m.log_map(c.w, c.x).vec;
  const Vec ly = m.log_map(c.w, y).vec;
  const Vec g = f.gradient(c.w).vec;
  const double s = 1.0 + lambda * mu;
  const double first = sq(m.norm_at(c.w, lx - ly + lambda * c.v.vec));
  const double second =
      f.value(c.x) - f.value(c.w) - m.dot(lx, g) - 0.5 * mu * sq(m.norm_at(c.w, lx));
  return first / (2.0 * s * s) + lambda / s * second - c.eps;
}

IproxCertificate exact_quadratic(const Objective& f, const Point& y, double lambda) {
  const QuadraticForm* q = f.euclidean_quadratic();
  if (!q) throw ValidationError("exact_quadratic requires a euclidean quadratic objective");
  const int d = q->p.size();
  const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(d, d) + lambda * q->H;
  const Vec x = M.ldlt().solve(y.coords + lambda * (q->H * q->p));
  IproxCertificate c;
  c.x = {x};
  c.w = c.x;
  c.grad_w = f.gradient(c.x);
  // v = (y - x)/lambda equals H(x - p) up to rounding and makes x + lambda v = y.
  c.v = {c.x, (y.coords - x) / lambda};
  c.eps = 0.0;
  c.lhs_residual = verify(f, y, c, lambda, f.mu());
  return c;
}

IproxCertificate nesterov_grad(const Objective& f, const Point& y, double lambda,
                               double sigma) {
  const Manifold& m = f.manifold();
  IproxCertificate c;
  c.w = y;
  c.grad_w = f.gradient(y);
  c.x = m.exp_map(y, scaled(c.grad_w, -lambda));
  c.v = {y, c.grad_w.vec + f.mu() * m.log_map(y, c.x).vec};
  return finish(f, y, std::move(c), lambda, sigma);
}

IproxCertificate two_step_grad(const Objective& f, const Point& y, double lambda) {
  const Manifold& m = f.manifold();
  IproxCertificate c;
  c.w = y;
  c.grad_w = f.gradient(y);
  const Point xt = m.exp_map(y, scaled(c.grad_w, -lambda));
  c.x = m.exp_map(xt, scaled(f.gradient(xt), -lambda));
  c.v = {y, c.grad_w.vec + f.mu() * m.log_map(y, c.x).vec};
  return finish(f, y, std::move(c), lambda, kTwoStepSigma);
}

IproxCertificate raxgd(const Objective& f, const Point& y, double lambda, double sigma) {
  const Manifold& m = f.manifold();
  IproxCertificate c;
  c.x = m.exp_map(y, scaled(f.gradient(y), -lambda));
  c.w = c.x;
  c.grad_w = f.gradient(c.x);
  c.v = c.grad_w;
  return finish(f, y, std::move(c), lambda, sigma);
}

double gen_raxgd_offset_ratio(double sigma, double mu_lambda) {
  // Largest rho with (rho a + (sigma/2)(1+rho))^2 + (sigma/2) a^2 rho^2 <=
  // 0.9 sigma^2, a = 1 + mu lambda: a flat-space sufficient condition for
  // the certificate when lambda <= sigma/(2L).
  const double a = 1.0 + mu_lambda;
  auto lhs = [&](double r) {
    const double t = r * a + 0.5 * sigma * (1.0 + r);
    return t * t + 0.5 * sigma * a * a * r * r;
  };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (lhs(mid) <= 0.9 * sigma * sigma ? lo : hi) = mid;
  }
  return std::min((1.0 - sigma) / 3.0, lo);
}

OffsetRule random_offset_rule(double fraction, unsigned long long seed) {
  auto rng = std::make_shared<Rng>(seed);
  return [fraction, rng](const Manifold& m, const Point& y, const Point& w) {
    const double r = fraction * m.distance(y, w);
    return m.exp_map(w, m.random_tangent(*rng, w, r));
  };
}

IproxCertificate gen_raxgd(const Objective& f, const Point& y, double lambda,
                           double sigma, const OffsetRule& offset) {
  const Manifold& m = f.manifold();
  IproxCertificate c;
  c.w = m.exp_map(y, scaled(f.gradient(y), -lambda));
  Point x = offset ? offset(m, y, c.w) : c.w;
  const double rho = gen_raxgd_offset_ratio(sigma, f.mu() * lambda);
  auto ok = [&](const Point& p) {
    return m.distance(c.w, p) <= rho * m.distance(y, p);
  };
  if (!ok(x)) {
    // Pull x back along the geodesic from w; t = 0 (x = w) always satisfies it.
    const Point far = x;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      (ok(m.geodesic_interpolate(c.w, far, mid)) ? lo : hi) = mid;
    }
    x = m.geodesic_interpolate(c.w, far, lo);
    if (!ok(x)) throw NumericError("gen_raxgd: offset projection failed");
  }
  c.x = x;
  c.grad_w = f.gradient(c.w);
  c.v = {c.w, c.grad_w.vec + f.mu() * m.log_map(c.w, c.x).vec};
  return finish(f, y, std::move(c), lambda, sigma);
}

IproxCertificate apply_strategy(const Objective& f, const Point& y, const Strategy& s) {
  switch (s.kind) {
    case StrategyKind::exact_quadratic: return exact_quadratic(f, y, s.lambda);
    case StrategyKind::nesterov_grad: return nesterov_grad(f, y, s.lambda, s.sigma);
    case StrategyKind::two_step_grad: return two_step_grad(f, y, s.lambda);
    case StrategyKind::raxgd: return raxgd(f, y, s.lambda, s.sigma);
    case StrategyKind::gen_raxgd: return gen_raxgd(f, y, s.lambda, s.sigma, s.offset);
  }
  throw ContractViolation("unknown strategy");
}

double subgradient_gap(const Objective& f, const IproxCertificate& c) {
  const Manifold& m = f.manifold();
  const Vec r = c.v.vec - f.mu() * m.log_map(c.w, c.x).vec - f.gradient(c.w).vec;
  return m.norm_at(c.w, r);
}

double relative_error_gap(const Manifold& m, const Point& y, const IproxCertificate& c,
                          double lambda, double sigma) {
  const Vec r = m.log_map(c.w, c.x).vec - m.log_map(c.w, y).vec + lambda * c.v.vec;
  return m.norm_at(c.w, r) - sigma * m.tangent_distance(c.w, c.x, y);
}

double eps_subgradient_check(const Objective& f, const IproxCertificate& c,
                             double lambda, double mu, int samples, Rng& rng) {
  const Manifold& m = f.manifold();
  if (!m.is_flat())
    throw ContractViolation("eps_subgradient_check is defined on euclidean space only");
  const double fx = f.value(c.x);
  const double slack = (1.0 + lambda * mu) / lambda * c.eps;
  auto violation = [&](const Vec& z) {
    const Vec d = z - c.x.coords;
    return fx + c.v.vec.dot(d) + 0.5 * mu * d.squaredNorm() - slack - f.value({z});
  };
  double worst = violation(c.w.coords);
  const double scale = 1.0 + (c.x.coords - c.w.coords).norm();
  std::normal_distribution<double> g(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    Vec z = c.x.coords;
    const double r = scale * std::pow(10.0, -3.0 + 4.0 * (s % 8) / 7.0);
    Vec dir(z.size());
    for (int i = 0; i < dir.size(); ++i) dir[i] = g(rng);
    z += r * dir.normalized();
    worst = std::max(worst, violation(z));
  }
  return worst;
}

}  // namespace ahpe
