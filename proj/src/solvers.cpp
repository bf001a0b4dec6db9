#include "ahpe/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ahpe/errors.hpp"

namespace ahpe {

namespace {

constexpr double kMachineEps = std::numeric_limits<double>::epsilon();

double sq(double v) { return v * v; }

double strategy_sigma(const Strategy& st) {
  switch (st.kind) {
    case StrategyKind::exact_quadratic: return 0.0;
    case StrategyKind::two_step_grad: return 0.75;
    default: return st.sigma;
  }
}

double residual_tolerance(const Objective& f, const IproxCertificate& c, double lambda) {
  const double s = lambda / (1.0 + lambda * f.mu());
  return 1e-12 * std::max(1.0, s * (std::abs(f.value(c.x)) + std::abs(f.value(c.w))));
}

void fill_optimum_fields(TraceRecord& r, const SolverState& s, const Objective& f) {
  if (f.optimal_value()) r.f_gap = f.value(s.x) - *f.optimal_value();
  if (f.optimum()) r.dist_to_opt = f.manifold().distance(s.x, *f.optimum());
  r.potential = s.potential;
}

TraceRecord record_of(const SolverState& s, const Objective& f) {
  TraceRecord r;
  r.k = s.k;
  r.A = s.A;
  r.B = s.B;
  r.a = s.a;
  r.theta = s.theta;
  r.delta = s.delta;
  r.xi = s.xi;
  r.d_wz = f.manifold().distance(s.w, s.z);
  fill_optimum_fields(r, s, f);
  return r;
}

void finish_step(const SolverState& prev, const Objective& f, StepResult& out,
                 double required_decrease, bool theory_applies) {
  const Manifold& m = f.manifold();
  SolverState& n = out.next;
  n.potential = potential_value(n, f).value_or(NAN);
  out.record = record_of(n, f);
  out.record.iprox_residual = out.cert.lhs_residual;

  StepDiagnostics& d = out.diag;
  d.k = n.k;
  d.subgradient_gap = subgradient_gap(f, out.cert);
  d.a_ratio = prev.A > 0 ? n.A / prev.A : NAN;
  d.w_to_y = m.distance(n.w, n.y);
  d.theory_applies = theory_applies;
  d.in_domain = f.in_domain(n.x) && f.in_domain(n.w) && f.in_domain(n.y);
  if (std::isfinite(prev.potential) && std::isfinite(n.potential)) {
    d.potential_increase = n.potential - prev.potential;
    d.potential_tolerance = 1e-10 * std::abs(prev.potential) +
                            potential_rounding(prev, f) + potential_rounding(n, f);
    if (std::isfinite(required_decrease))
      d.margin_shortfall =
          required_decrease - (prev.potential - n.potential) - d.potential_tolerance;
  }
  if (f.optimum()) {
    const Point& xs = *f.optimum();
    d.distortion_excess = sq(m.tangent_distance(n.w, prev.z, xs)) -
                          prev.delta * sq(m.tangent_distance(prev.w, prev.z, xs));
  }
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::euclidean: return "euclidean";
    case Algorithm::riemannian: return "riemannian";
    case Algorithm::rgd: return "rgd";
  }
  return "unknown";
}

std::string to_string(WRule w) {
  return w == WRule::y_anchored ? "y_anchored" : "strategy_determined";
}

std::string to_string(CheckPolicy c) {
  switch (c) {
    case CheckPolicy::enforce: return "enforce";
    case CheckPolicy::record: return "record";
    case CheckPolicy::off: return "off";
  }
  return "unknown";
}

bool strategy_anchors_at_y(StrategyKind k) {
  return k == StrategyKind::nesterov_grad || k == StrategyKind::two_step_grad;
}

WRule default_w_rule(StrategyKind k) {
  return strategy_anchors_at_y(k) ? WRule::y_anchored : WRule::strategy_determined;
}

double euclid_coeff(double A, double mu, double lambda) {
  if (A < 0 || lambda <= 0 || mu < 0)
    throw ContractViolation("euclid_coeff: needs A >= 0, lambda > 0, mu >= 0");
  const double b = (1.0 + 2.0 * mu * A) * lambda;
  return 0.5 * (b + std::sqrt(b * b + 4.0 * (1.0 + mu * A) * A * lambda));
}

double riemann_theta(double B, double A, double mu, double lambda, double delta) {
  if (!(B > 0) || !(delta >= 1.0))
    throw ContractViolation("riemann_theta: needs B > 0 and delta >= 1");
  // theta^2 B(1+mu lambda) - theta (B(2+mu lambda) + mu^2 lambda delta A/2) + B = 0
  const double ml = mu * lambda;
  const double a2 = B * (1.0 + ml);
  const double a1 = -(B * (2.0 + ml) + 0.5 * mu * ml * delta * A);
  const double a0 = B;
  const double disc = a1 * a1 - 4.0 * a2 * a0;
  if (!(disc >= 0)) throw NumericError("riemann_theta: negative discriminant");
  const double theta = 2.0 * a0 / (-a1 + std::sqrt(disc));
  if (!(theta > 0.0 && theta <= 1.0) || !std::isfinite(theta))
    throw NumericError("riemann_theta: no root in (0,1]");
  return theta;
}

double xi_recursion_residual(double xi, double xi_next, double delta, double mu,
                             double lambda) {
  const double ml = mu * lambda;
  return std::abs(delta * xi_next * xi_next - xi * xi * (1.0 - xi_next) -
                  ml / (1.0 + ml) * delta * xi_next);
}

double xi_fixed_point(double mu, double lambda) {
  const double ml = mu * lambda;
  return std::sqrt(ml / (1.0 + ml));
}

double initial_xi(double A0, double B0, double mu, double lambda) {
  if (!(A0 > 0)) return INFINITY;
  return std::sqrt(2.0 * lambda * B0 / ((1.0 + mu * lambda) * A0));
}

std::optional<double> potential_value(const SolverState& s, const Objective& f) {
  if (!f.optimum() || !f.optimal_value()) return std::nullopt;
  const Manifold& m = f.manifold();
  const double dz = m.tangent_distance(s.w, s.z, *f.optimum());
  return s.A * (f.value(s.x) - *f.optimal_value()) + s.B * dz * dz;
}

double potential_rounding(const SolverState& s, const Objective& f) {
  if (!f.optimum() || !f.optimal_value()) return 0.0;
  const Manifold& m = f.manifold();
  const Point& xs = *f.optimum();
  const double fs = *f.optimal_value();
  double r = 0.0, gap_err = 0.0;
  if (f.optimum_is_numerical()) {
    const double g = m.norm(f.gradient(xs));
    r = g / f.mu();
    gap_err = g * g / (2.0 * f.mu());
  }
  const double scale = 1.0 + s.z.coords.lpNorm<Eigen::Infinity>() +
                       s.w.coords.lpNorm<Eigen::Infinity>();
  const double eta = 64.0 * kMachineEps * scale + r;
  const double dz = m.tangent_distance(s.w, s.z, xs);
  return s.A * (8.0 * kMachineEps * (std::abs(f.value(s.x)) + std::abs(fs)) + gap_err) +
         s.B * (2.0 * dz * eta + eta * eta);
}

double distance_to_geodesic(const Manifold& m, const Point& w, const Point& x,
                            const Point& z) {
  auto dist_at = [&](double t) { return m.distance(w, m.geodesic_interpolate(x, z, t)); };
  // d(w, gamma(t)) is convex in t on a Hadamard manifold.
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = 0.0, hi = 1.0;
  double t1 = hi - g * (hi - lo), t2 = lo + g * (hi - lo);
  double f1 = dist_at(t1), f2 = dist_at(t2);
  for (int i = 0; i < 80; ++i) {
    if (f1 < f2) {
      hi = t2;
      t2 = t1;
      f2 = f1;
      t1 = hi - g * (hi - lo);
      f1 = dist_at(t1);
    } else {
      lo = t1;
      t1 = t2;
      f1 = f2;
      t2 = lo + g * (hi - lo);
      f2 = dist_at(t2);
    }
  }
  return std::min({f1, f2, dist_at(0.0), dist_at(1.0)});
}

SolverState initial_state(const Objective& f, const Point& x0, const SolverConfig& cfg) {
  const Manifold& m = f.manifold();
  SolverState s;
  s.k = 0;
  s.x = m.validate(x0);
  s.z = s.x;
  s.w = s.x;
  s.y = s.x;
  if (!(cfg.A0 >= 0)) throw ValidationError("A0 must be nonnegative");
  s.A = cfg.A0;
  const double mu = f.mu();
  if (cfg.B0) {
    s.B = *cfg.B0;
  } else {
    s.B = cfg.algorithm == Algorithm::euclidean ? 0.5 * (1.0 + mu * cfg.A0) : 0.5 * mu * cfg.A0;
  }
  if (!(s.B > 0)) throw ValidationError("B0 must be positive");
  s.lambda = cfg.strategy.lambda;
  s.sigma = strategy_sigma(cfg.strategy);
  s.xi = initial_xi(s.A, s.B, mu, s.lambda);
  s.delta = valid_rate(m, s.w, s.z).delta;
  s.potential = potential_value(s, f).value_or(NAN);
  return s;
}

TraceRecord initial_record(const SolverState& s, const Objective& f) {
  TraceRecord r = record_of(s, f);
  r.theta = 0.0;
  r.a = 0.0;
  return r;
}

StepResult euclid_step(const SolverState& s, const Objective& f, const Strategy& st) {
  const Manifold& m = f.manifold();
  if (!m.is_flat()) throw ContractViolation("euclid_step requires a euclidean manifold");
  const double mu = f.mu();
  const double lambda = st.lambda;
  const double a = euclid_coeff(s.A, mu, lambda);
  const double A1 = s.A + a;
  const double tau = a * (1.0 + mu * s.A) / (A1 + mu * (a * s.A + s.A * A1));

  StepResult out;
  SolverState& n = out.next;
  n = s;
  n.k = s.k + 1;
  n.y = {s.x.coords + tau * (s.z.coords - s.x.coords)};
  out.cert = apply_strategy(f, n.y, st);
  n.x = out.cert.x;
  n.w = out.cert.w;
  n.z = {s.z.coords +
         (a / (1.0 + mu * A1)) * (mu * (n.x.coords - s.z.coords) - out.cert.v.vec)};
  n.a = a;
  n.A = A1;
  n.B = 0.5 * (1.0 + mu * A1);
  n.theta = (1.0 + mu * s.A) / (1.0 + mu * A1);
  n.delta = 1.0;
  n.xi = a / A1;
  n.y_prime = n.y;

  const double sigma = strategy_sigma(st);
  const double required = (s.A > 0 ? mu * lambda * s.A * (1.0 + mu * s.A) / (2.0 * a) *
                                         (s.x.coords - s.z.coords).squaredNorm()
                                   : 0.0) +
                          (1.0 - sigma * sigma) * A1 / (2.0 * lambda) *
                              (n.x.coords - n.y.coords).squaredNorm();
  finish_step(s, f, out, required, true);
  out.record.y_yprime_gap = 0.0;
  out.record.xi_recursion_residual = xi_recursion_residual(s.xi, n.xi, 1.0, mu, lambda);
  return out;
}

StepResult riemann_step(const SolverState& s, const Objective& f, const Strategy& st,
                        WRule w_rule) {
  const Manifold& m = f.manifold();
  const double mu = f.mu();
  const double lambda = st.lambda;
  if (w_rule == WRule::y_anchored && !strategy_anchors_at_y(st.kind) && !m.is_flat())
    throw ValidationError("w_rule y_anchored needs a strategy that returns w = y");

  const double delta = s.delta;
  const double theta = riemann_theta(s.B, s.A, mu, lambda, delta);
  const double B1 = s.B / (theta * delta);
  const double a = 2.0 / mu * (1.0 - theta) * B1;
  const double A1 = s.A + a;
  const double ty = theta * a / (s.A + theta * a);

  StepResult out;
  SolverState& n = out.next;
  n = s;
  n.k = s.k + 1;
  n.y = m.geodesic_interpolate(s.x, s.z, ty);
  out.cert = apply_strategy(f, n.y, st);
  n.x = out.cert.x;
  n.w = out.cert.w;

  const Vec lx1 = m.log_map(n.w, n.x).vec;
  const Vec lz = m.log_map(n.w, s.z).vec;
  const Vec lx = m.log_map(n.w, s.x).vec;
  n.z = m.exp_map(n.w, m.project_tangent(
                           n.w, (1.0 - theta) * lx1 + theta * lz -
                                    ((1.0 - theta) / mu) * out.cert.v.vec));
  const Vec yp = (s.A / (s.A + theta * a)) * lx + ty * lz;
  n.y_prime = m.exp_map(n.w, m.project_tangent(n.w, yp));
  const double gap = m.norm_at(n.w, m.log_map(n.w, n.y).vec - yp);

  n.a = a;
  n.A = A1;
  n.B = B1;
  n.theta = theta;
  n.xi = a / A1;
  if (!std::isfinite(n.A) || !std::isfinite(n.B))
    throw NumericError("coefficient recursion overflowed");
  // A z sequence far outside the smoothness domain makes delta grow like
  // exp(4 sqrt(K) d); the hyperboloid coordinates then lose all precision.
  if (m.constraint_drift(n.z) > 1e-6)
    throw NumericError("z sequence diverged; hyperboloid coordinates lost precision");
  n.delta = valid_rate(m, n.w, n.z).delta;
  if (!std::isfinite(n.delta)) throw NumericError("distortion rate overflowed");

  const bool on_geodesic = m.is_flat() || strategy_anchors_at_y(st.kind);
  const double sigma = strategy_sigma(st);
  double required = NAN;
  if (on_geodesic) {
    const double dxy = m.tangent_distance(n.w, n.x, n.y);
    const double dxz = m.norm_at(n.w, lx - lz);
    required = (1.0 - sigma) * A1 / (2.0 * lambda) * dxy * dxy +
               mu * theta * a * s.A / (2.0 * (s.A + theta * a)) * dxz * dxz;
  }
  finish_step(s, f, out, required, on_geodesic);
  out.record.y_yprime_gap = gap;
  out.record.xi_recursion_residual = xi_recursion_residual(s.xi, n.xi, delta, mu, lambda);

  if (!on_geodesic) {
    const double dstar = distance_to_geodesic(m, n.w, s.x, s.z);
    out.diag.d_star = dstar;
    out.diag.addis_bound =
        2.0 * dstar * s_rate(m.curvature(), m.distance(s.x, s.z) + dstar);
    out.diag.addis_excess = gap - out.diag.addis_bound;
  }
  return out;
}

RunResult run(const Objective& f, const Point& x0, const SolverConfig& cfg) {
  if (cfg.max_iters < 0) throw ValidationError("max_iters must be nonnegative");
  if (cfg.algorithm == Algorithm::rgd)
    return rgd_baseline(f, x0, cfg.strategy.lambda, cfg.max_iters, cfg.target_gap);
  if (cfg.algorithm == Algorithm::euclidean && !f.manifold().is_flat())
    throw ValidationError("the euclidean algorithm needs a euclidean manifold");
  check_strategy(f, cfg.strategy);

  RunResult res;
  SolverState s = initial_state(f, x0, cfg);
  res.trace.push_back(initial_record(s, f));
  auto reached = [&](const TraceRecord& r) {
    return cfg.target_gap > 0 && std::isfinite(r.f_gap) && r.f_gap <= cfg.target_gap;
  };
  if (reached(res.trace.back())) res.iterations_to_target = 0;

  int out_of_domain = 0;
  for (int k = 0; k < cfg.max_iters && res.iterations_to_target < 0; ++k) {
    StepResult st = cfg.algorithm == Algorithm::euclidean
                        ? euclid_step(s, f, cfg.strategy)
                        : riemann_step(s, f, cfg.strategy, cfg.w_rule);
    const auto& d = st.diag;
    res.worst_residual = std::max(res.worst_residual, st.cert.lhs_residual);
    if (std::isfinite(s.potential) && s.potential > 0)
      res.worst_relative_potential_increase = std::max(
          res.worst_relative_potential_increase, d.potential_increase / s.potential);
    if (!d.in_domain) ++out_of_domain;

    if (cfg.checks == CheckPolicy::enforce) {
      const double tol = residual_tolerance(f, st.cert, cfg.strategy.lambda);
      if (st.cert.lhs_residual > tol)
        throw CertificateError("iprox certificate failed at step " + std::to_string(d.k) +
                               " (residual " + std::to_string(st.cert.lhs_residual) + ")");
      const double gscale = 1.0 + f.manifold().norm(st.cert.grad_w);
      if (d.subgradient_gap > 1e-9 * gscale)
        throw CertificateError("subgradient condition failed at step " +
                               std::to_string(d.k));
      if (d.theory_applies && d.potential_increase > d.potential_tolerance)
        throw CertificateError("potential increased at step " + std::to_string(d.k));
    }
    if (cfg.checks != CheckPolicy::off) res.diagnostics.push_back(d);
    res.trace.push_back(st.record);
    s = std::move(st.next);
    if (reached(res.trace.back())) res.iterations_to_target = s.k;
  }
  if (out_of_domain > 0)
    res.warnings.push_back("iterates left the smoothness domain at " +
                           std::to_string(out_of_domain) + " step(s)");
  res.final_state = std::move(s);
  return res;
}

RunResult rgd_baseline(const Objective& f, const Point& x0, double lambda, int max_iters,
                       double target_gap) {
  const Manifold& m = f.manifold();
  if (!(lambda > 0)) throw ValidationError("lambda must be positive");
  if (lambda > (1.0 + 1e-12) / f.L())
    throw ValidationError("gradient descent requires lambda <= 1/L");
  RunResult res;
  SolverState s;
  s.x = m.validate(x0);
  s.z = s.w = s.y = s.x;
  s.A = s.B = 0.0;
  s.lambda = lambda;
  auto rec = [&](int k) {
    TraceRecord r;
    r.k = k;
    r.A = r.B = r.xi = 0.0;
    r.delta = 1.0;
    fill_optimum_fields(r, s, f);
    r.potential = r.f_gap;
    return r;
  };
  res.trace.push_back(rec(0));
  auto reached = [&](const TraceRecord& r) {
    return target_gap > 0 && std::isfinite(r.f_gap) && r.f_gap <= target_gap;
  };
  if (reached(res.trace.back())) res.iterations_to_target = 0;
  for (int k = 1; k <= max_iters && res.iterations_to_target < 0; ++k) {
    TangentVector g = f.gradient(s.x);
    g.vec *= -lambda;
    s.x = m.exp_map(s.x, g);
    s.z = s.w = s.y = s.x;
    s.k = k;
    res.trace.push_back(rec(k));
    if (reached(res.trace.back())) res.iterations_to_target = k;
  }
  res.final_state = s;
  return res;
}

}  // namespace ahpe
