#include "ahpe/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ahpe/errors.hpp"

namespace ahpe {

namespace {

CheckResult make(const std::string& scope, const std::string& name, double tol) {
  CheckResult c;
  c.scope = scope;
  c.name = name;
  c.tolerance = tol;
  return c;
}

void bump(CheckResult& c, double v) {
  ++c.samples;
  if (std::isnan(v)) v = INFINITY;
  c.max_violation = std::max(c.max_violation, v);
}

std::vector<Manifold> sample_manifolds() {
  return {Manifold::euclidean(3), Manifold::hyperbolic(2, 1.0), Manifold::hyperbolic(5, 0.5),
          Manifold::hyperbolic(8, 2.0)};
}

std::string label(const Manifold& m) {
  char buf[64];
  if (m.is_flat())
    std::snprintf(buf, sizeof buf, "R^%d", m.dim());
  else
    std::snprintf(buf, sizeof buf, "H^%d(K=%g)", m.dim(), m.curvature());
  return buf;
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
}

std::string VerifyReport::format() const {
  std::string s;
  char buf[256];
  for (const auto& c : checks) {
    std::snprintf(buf, sizeof buf, "[%s] %-11s %-52s n=%-6d max_violation=%.3e tol=%.1e\n",
                  c.passed() ? "PASS" : "FAIL", c.scope.c_str(), c.name.c_str(), c.samples,
                  c.max_violation, c.tolerance);
    s += buf;
  }
  return s;
}

CheckResult check_exp_log_roundtrip(const Manifold& m, int n, Rng& rng) {
  auto c = make("manifold", "exp(log) round trip " + label(m), 1e-9);
  for (int i = 0; i < n; ++i) {
    const Point x = m.random_point(rng, 3.0), y = m.random_point(rng, 3.0);
    const double d = m.distance(x, y);
    bump(c, m.distance(m.exp_map(x, m.log_map(x, y)), y) / (1.0 + d));
  }
  return c;
}

CheckResult check_log_norm_is_distance(const Manifold& m, int n, Rng& rng) {
  auto c = make("manifold", "|log_x y| = d(x,y) " + label(m), 1e-9);
  for (int i = 0; i < n; ++i) {
    const Point x = m.random_point(rng, 3.0), y = m.random_point(rng, 3.0);
    const double d = m.distance(x, y);
    bump(c, std::abs(m.norm(m.log_map(x, y)) - d) / (1.0 + d));
  }
  return c;
}

CheckResult check_transport_isometry(const Manifold& m, int n, Rng& rng,
                                     const TransportFn& transport) {
  auto c = make("manifold", "transport isometry " + label(m), 1e-9);
  for (int i = 0; i < n; ++i) {
    const Point x = m.random_point(rng, 2.0), y = m.random_point(rng, 2.0);
    const TangentVector u = m.random_tangent(rng, x, 1.0);
    TangentVector v = m.random_tangent(rng, x, 1.0);
    // Mix in u so that the pair is not nearly orthogonal.
    v.vec = 0.5 * v.vec + 0.5 * u.vec;
    const TangentVector gu = transport ? transport(m, x, y, u) : m.transport(x, y, u);
    const TangentVector gv = transport ? transport(m, x, y, v) : m.transport(x, y, v);
    const double err = std::abs(m.dot(gu.vec, gv.vec) - m.dot(u.vec, v.vec));
    bump(c, err / (m.norm(u) * m.norm(v)));
  }
  return c;
}

CheckResult check_tangent_domination(const Manifold& m, int n, Rng& rng) {
  auto c = make("manifold", "d_w(x,y) <= d(x,y) " + label(m), 1e-12);
  for (int i = 0; i < n; ++i) {
    const Point w = m.random_point(rng, 2.0), x = m.random_point(rng, 2.0),
                y = m.random_point(rng, 2.0);
    const double dxy = m.distance(x, y);
    bump(c, (m.tangent_distance(w, x, y) - dxy) / (1.0 + dxy));
  }
  return c;
}

CheckResult check_constraint_preserved(const Manifold& m, int n, Rng& rng) {
  auto c = make("manifold", "outputs stay on the manifold " + label(m), 1e-12);
  for (int i = 0; i < n; ++i) {
    const Point x = m.random_point(rng, 3.0), y = m.random_point(rng, 3.0);
    bump(c, m.constraint_drift(m.exp_map(x, m.random_tangent(rng, x, 2.0))));
    bump(c, m.constraint_drift(m.geodesic_interpolate(x, y, 0.37)));
    if (!m.is_flat()) {
      bump(c, std::abs(minkowski(x.coords, m.log_map(x, y).vec)) / (1.0 + x.coords.norm()));
      const TangentVector t = m.transport(x, y, m.random_tangent(rng, x, 1.0));
      bump(c, std::abs(minkowski(y.coords, t.vec)) / (1.0 + y.coords.norm()));
    }
  }
  return c;
}

CheckResult check_t_rate_validity(const Manifold& m, int n, Rng& rng, double radius) {
  auto c = make("distortion", "T_K validity on quadruples " + label(m), 1e-9);
  const double K = m.curvature();
  for (int i = 0; i < n; ++i) {
    const Point w = m.random_point(rng, radius), z = m.random_point(rng, radius),
                x = m.random_point(rng, radius), y = m.random_point(rng, radius);
    const double dxy = m.distance(x, y);
    const double dz = m.tangent_distance(z, x, y);
    bump(c, dxy * dxy - t_rate(K, m.distance(x, z)) * dz * dz);
    // Valid-rate form: moving the base from w to y cannot grow d^2(z,x) by more than delta.
    const double delta = valid_rate(m, w, z).delta;
    const double before = m.tangent_distance(w, z, x);
    const double after = m.tangent_distance(y, z, x);
    bump(c, after * after - delta * before * before);
  }
  return c;
}

CheckResult check_s_rate_quadratic_bound(double K, double c) {
  char name[96];
  std::snprintf(name, sizeof name, "S_K(r) <= %.6g K r^2 when K r^2 <= 1", c);
  auto res = make("distortion", name, 1e-15);
  const double rmax = 1.0 / std::sqrt(K);
  for (int i = 0; i <= 2000; ++i) {
    const double r = rmax * i / 2000.0;
    bump(res, s_rate(K, r) - c * K * r * r);
  }
  return res;
}

CheckResult check_rate_monotonicity(double K) {
  auto c = make("distortion", "T_K >= 1, T_K, S_K, S_K/r nondecreasing", 1e-15);
  double pt = 1.0, ps = 0.0, pq = 0.0;
  for (int i = 1; i <= 4000; ++i) {
    const double r = 4.0 * i / 4000.0;
    const double t = t_rate(K, r), s = s_rate(K, r), q = s / r;
    bump(c, 1.0 - t);
    bump(c, (pt - t) / pt);
    bump(c, ps - s);
    bump(c, pq - q);
    pt = t;
    ps = s;
    pq = q;
  }
  return c;
}

CheckResult check_t_rate_quadratic_bound(double K) {
  auto c = make("distortion", "T_K(r) <= 1 + 4K r^2 when K r^2 <= 1/2", 1e-15);
  const double rmax = std::sqrt(0.5 / K);
  for (int i = 0; i <= 2000; ++i) {
    const double r = rmax * i / 2000.0;
    bump(c, t_rate(K, r) - (1.0 + 4.0 * K * r * r));
  }
  return c;
}

CheckResult check_interpolation_identity(int n, Rng& rng) {
  auto c = make("distortion", "interpolation identity (relative)", 1e-10);
  std::uniform_real_distribution<double> pq(0.0, 10.0);
  std::uniform_int_distribution<int> dim(1, 64);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    const int d = dim(rng);
    Vec x(d), y(d);
    for (int j = 0; j < d; ++j) {
      x[j] = g(rng);
      y[j] = g(rng);
    }
    double p = pq(rng), q = pq(rng);
    if (p == 0.0) p = 1e-3;
    if (q == 0.0) q = 1e-3;
    const auto s = interpolation_identity(p, q, x, y);
    bump(c, std::abs(s.lhs - s.rhs) / std::max(std::abs(s.lhs), 1e-300));
  }
  return c;
}

namespace {

void manifold_checks(VerifyReport& rep) {
  Rng rng(101);
  for (const auto& m : sample_manifolds()) {
    rep.checks.push_back(check_exp_log_roundtrip(m, 1000, rng));
    rep.checks.push_back(check_log_norm_is_distance(m, 1000, rng));
    rep.checks.push_back(check_transport_isometry(m, 1000, rng));
    rep.checks.push_back(check_tangent_domination(m, 1000, rng));
    rep.checks.push_back(check_constraint_preserved(m, 500, rng));
  }
}

void distortion_checks(VerifyReport& rep) {
  Rng rng(202);
  for (double K : {0.5, 1.0, 3.0}) {
    rep.checks.push_back(check_s_rate_quadratic_bound(K, std::exp(-1.0)));
    rep.checks.push_back(check_rate_monotonicity(K));
    rep.checks.push_back(check_t_rate_quadratic_bound(K));
  }
  rep.checks.push_back(check_t_rate_validity(Manifold::hyperbolic(4, 1.0), 10000, rng, 1.5));
  rep.checks.push_back(check_interpolation_identity(10000, rng));
}

std::vector<ObjectivePtr> sample_objectives(Rng& rng) {
  std::vector<ObjectivePtr> out;
  const auto H = Manifold::hyperbolic(5, 1.0);
  const auto E = Manifold::euclidean(6);
  std::vector<Point> anchors;
  for (int i = 0; i < 8; ++i) anchors.push_back(H.random_point(rng, 0.5));
  out.push_back(make_karcher(H, anchors, std::vector<double>(8, 1.0 / 8), 0.5));
  out.push_back(make_squared_distance(H, H.random_point(rng, 0.3), 1.0));
  out.push_back(make_conditioned_quadratic(H, H.random_point(rng, 0.3), 1.0, 20.0, 0.5, rng));
  out.push_back(make_conditioned_quadratic(E, E.random_point(rng, 1.0), 0.5, 50.0, 1.0, rng));
  return out;
}

void objective_checks(VerifyReport& rep) {
  Rng rng(303);
  for (const auto& f : sample_objectives(rng)) {
    const std::string tag = f->kind() + " " + label(f->manifold());
    auto sc = check_strong_convexity(*f, 1000, rng);
    auto c1 = make("objectives", "strong convexity " + tag, 1e-9);
    c1.samples = sc.samples;
    c1.max_violation = sc.max_violation;
    rep.checks.push_back(c1);
    auto sm = check_smoothness(*f, 1000, rng);
    auto c2 = make("objectives", "smoothness " + tag, 1e-9);
    c2.samples = sm.samples;
    c2.max_violation = sm.max_violation;
    rep.checks.push_back(c2);
    auto lm = check_lower_model(*f, 1000, rng);
    auto c3 = make("objectives", "lower model below f " + tag, 1e-9);
    c3.samples = lm.samples;
    c3.max_violation = lm.max_violation;
    rep.checks.push_back(c3);
    auto c4 = make("objectives", "gradient vs central difference " + tag, 1e-6);
    const Manifold& m = f->manifold();
    for (int i = 0; i < 200; ++i) {
      const Point x = sample_domain_point(*f, rng);
      const TangentVector u = m.random_tangent(rng, x, 1.0);
      const double h = 1e-5;
      TangentVector up = u, um = u;
      up.vec *= h;
      um.vec *= -h;
      const double fd = (f->value(m.exp_map(x, up)) - f->value(m.exp_map(x, um))) / (2 * h);
      bump(c4, std::abs(fd - m.dot(f->gradient(x).vec, u.vec)) /
                   (1.0 + m.norm(f->gradient(x))));
    }
    rep.checks.push_back(c4);
    if (f->optimum()) {
      auto c5 = make("objectives", "gradient vanishes at optimum " + tag, 1e-8);
      bump(c5, m.norm(f->gradient(*f->optimum())));
      rep.checks.push_back(c5);
    }
  }
}

void iprox_checks(VerifyReport& rep) {
  Rng rng(404);
  for (const auto& f : sample_objectives(rng)) {
    const std::string tag = f->kind() + " " + label(f->manifold());
    std::vector<Strategy> strategies;
    const double L = f->L(), mu = f->mu();
    for (auto k : {StrategyKind::nesterov_grad, StrategyKind::two_step_grad,
                   StrategyKind::raxgd, StrategyKind::gen_raxgd}) {
      Strategy s;
      s.kind = k;
      s.sigma = 0.7;
      s.lambda = max_valid_lambda(k, L, mu, s.sigma);
      if (k == StrategyKind::gen_raxgd) s.offset = random_offset_rule(0.2, 9);
      strategies.push_back(s);
    }
    if (f->euclidean_quadratic()) {
      Strategy s;
      s.kind = StrategyKind::exact_quadratic;
      s.lambda = 1.0 / L;
      strategies.push_back(s);
    }
    for (const auto& s : strategies) {
      auto cr = make("iprox", to_string(s.kind) + " residual " + tag, 1e-12);
      auto cs = make("iprox", to_string(s.kind) + " subgradient " + tag, 1e-9);
      auto ce = make("iprox", to_string(s.kind) + " eps-subgradient " + tag, 1e-9);
      auto cq = make("iprox", to_string(s.kind) + " relative-error form " + tag, 1e-12);
      for (int i = 0; i < 100; ++i) {
        const Point y = sample_domain_point(*f, rng);
        const IproxCertificate c = apply_strategy(*f, y, s);
        bump(cr, c.lhs_residual);
        bump(cs, subgradient_gap(*f, c));
        if (f->manifold().is_flat())
          bump(ce, eps_subgradient_check(*f, c, s.lambda, mu, 50, rng));
        if (s.kind == StrategyKind::nesterov_grad || s.kind == StrategyKind::raxgd)
          bump(cq, relative_error_gap(f->manifold(), y, c, s.lambda, s.sigma));
      }
      rep.checks.push_back(cr);
      rep.checks.push_back(cs);
      if (ce.samples) rep.checks.push_back(ce);
      if (cq.samples) rep.checks.push_back(cq);
    }
  }
}

void solver_checks(VerifyReport& rep) {
  Rng rng(505);
  // Euclidean A-HPE with the exact prox.
  {
    const auto E = Manifold::euclidean(20);
    auto f = make_conditioned_quadratic(E, E.random_point(rng, 1.0), 1.0, 100.0, 1.0, rng);
    SolverConfig cfg;
    cfg.algorithm = Algorithm::euclidean;
    cfg.strategy.kind = StrategyKind::exact_quadratic;
    cfg.strategy.lambda = 1.0 / f->L();
    cfg.max_iters = 200;
    const Point x0 = E.exp_map(*f->optimum(), E.random_tangent(rng, *f->optimum(), 1.0));
    const RunResult r = run(*f, x0, cfg);
    auto cp = make("solver", "euclidean potential monotone (relative)", 1e-10);
    auto cg = make("solver", "euclidean gap <= p0/A_k", 0.0);
    auto ca = make("solver", "euclidean A_k >= A0(1+sqrt(mu lambda))^k", 0.0);
    const double p0 = r.trace.front().potential;
    const double q = 1.0 + std::sqrt(f->mu() * cfg.strategy.lambda);
    for (size_t k = 1; k < r.trace.size(); ++k) {
      bump(cp, (r.trace[k].potential - r.trace[k - 1].potential) / r.trace[k - 1].potential);
      bump(cg, r.trace[k].f_gap - p0 / r.trace[k].A);
      bump(ca, (cfg.A0 * std::pow(q, double(k)) - r.trace[k].A) / r.trace[k].A);
    }
    rep.checks.push_back(cp);
    rep.checks.push_back(cg);
    rep.checks.push_back(ca);
  }
  // Flat reduction.
  {
    const auto E = Manifold::euclidean(10);
    auto f = make_conditioned_quadratic(E, E.random_point(rng, 1.0), 1.0, 50.0, 1.0, rng);
    SolverConfig cfg;
    cfg.strategy.kind = StrategyKind::nesterov_grad;
    cfg.strategy.sigma = 0.7;
    cfg.strategy.lambda = 0.49 / (2.0 * f->L());
    cfg.max_iters = 100;
    cfg.B0 = 0.5 * (1.0 + f->mu() * cfg.A0);
    const Point x0 = E.random_point(rng, 2.0);
    cfg.algorithm = Algorithm::euclidean;
    const RunResult re = run(*f, x0, cfg);
    cfg.algorithm = Algorithm::riemannian;
    const RunResult rr = run(*f, x0, cfg);
    auto c = make("solver", "flat riemannian run equals euclidean run", 1e-9);
    for (size_t k = 0; k < re.trace.size(); ++k) {
      const double sc = std::max(1.0, std::abs(re.trace[k].A));
      bump(c, std::abs(re.trace[k].A - rr.trace[k].A) / sc);
      bump(c, std::abs(re.trace[k].f_gap - rr.trace[k].f_gap));
      bump(c, std::abs(re.trace[k].dist_to_opt - rr.trace[k].dist_to_opt));
    }
    rep.checks.push_back(c);
  }
  // Hyperbolic Karcher with w = y.
  {
    const auto H = Manifold::hyperbolic(5, 1.0);
    std::vector<Point> anchors;
    for (int i = 0; i < 10; ++i) anchors.push_back(H.random_point(rng, 0.5));
    auto f = make_karcher(H, anchors, std::vector<double>(10, 0.1), 0.5);
    SolverConfig cfg;
    cfg.strategy.kind = StrategyKind::nesterov_grad;
    cfg.strategy.sigma = 0.7;
    cfg.strategy.lambda = 0.49 / (2.0 * f->L());
    cfg.max_iters = 150;
    cfg.checks = CheckPolicy::record;
    const Point x0 = H.exp_map(*f->optimum(), H.random_tangent(rng, *f->optimum(), 0.4));
    const RunResult r = run(*f, x0, cfg);
    auto cp = make("solver", "riemannian potential monotone (rounding-aware)", 0.0);
    auto cm = make("solver", "riemannian potential decrease margin", 0.0);
    auto cx = make("solver", "xi recursion residual", 1e-10);
    auto cd = make("solver", "distortion validity along trajectory", 1e-9);
    auto cy = make("solver", "y = y' when w is on the geodesic", 1e-9);
    for (const auto& d : r.diagnostics) {
      bump(cp, d.potential_increase - d.potential_tolerance);
      bump(cm, d.margin_shortfall);
      bump(cd, d.distortion_excess);
    }
    for (size_t k = 1; k < r.trace.size(); ++k) {
      bump(cx, r.trace[k].xi_recursion_residual);
      bump(cy, r.trace[k].y_yprime_gap);
    }
    rep.checks.push_back(cp);
    rep.checks.push_back(cm);
    rep.checks.push_back(cx);
    rep.checks.push_back(cd);
    rep.checks.push_back(cy);
  }
  // RAXGD: additional distortion stays under its bound.
  {
    const auto H = Manifold::hyperbolic(4, 1.0);
    auto f = make_conditioned_quadratic(H, H.random_point(rng, 0.3), 1.0, 30.0, 0.5, rng);
    SolverConfig cfg;
    cfg.strategy.kind = StrategyKind::raxgd;
    cfg.strategy.sigma = 0.5;
    cfg.strategy.lambda = 0.5 / f->L();
    cfg.w_rule = WRule::strategy_determined;
    cfg.max_iters = 150;
    cfg.checks = CheckPolicy::record;
    const Point x0 = H.exp_map(*f->optimum(), H.random_tangent(rng, *f->optimum(), 0.2));
    const RunResult r = run(*f, x0, cfg);
    auto c = make("solver", "raxgd additional distortion within S_K bound", 1e-9);
    for (const auto& d : r.diagnostics) bump(c, d.addis_excess);
    rep.checks.push_back(c);
  }
}

}  // namespace

VerifyReport verify_suite(const std::string& scope) {
  static const char* scopes[] = {"manifold", "objectives", "distortion", "iprox", "solver", "all"};
  if (std::find(std::begin(scopes), std::end(scopes), scope) == std::end(scopes))
    throw ValidationError("unknown verify scope '" + scope + "'");
  VerifyReport rep;
  const bool all = scope == "all";
  if (all || scope == "manifold") manifold_checks(rep);
  if (all || scope == "objectives") objective_checks(rep);
  if (all || scope == "distortion") distortion_checks(rep);
  if (all || scope == "iprox") iprox_checks(rep);
  if (all || scope == "solver") solver_checks(rep);
  return rep;
}

}  // namespace ahpe
