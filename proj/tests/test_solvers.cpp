#include <doctest.h>

#include <cmath>

#include "ahpe/errors.hpp"
#include "ahpe/solvers.hpp"

using namespace ahpe;

namespace {

// Forwards to another objective but reports different constants.
class Misdeclared final : public Objective {
 public:
  Misdeclared(ObjectivePtr inner, double mu, double L)
      : Objective(inner->manifold(), mu, L), inner_(std::move(inner)) {
    center_ = inner_->domain_center();
    radius_ = inner_->domain_radius();
    opt_ = inner_->optimum();
    fopt_ = inner_->optimal_value();
  }
  std::string kind() const override { return inner_->kind(); }
  double value(const Point& x) const override { return inner_->value(x); }
  TangentVector gradient(const Point& x) const override { return inner_->gradient(x); }
  bool in_domain(const Point& x) const override { return inner_->in_domain(x); }

 private:
  ObjectivePtr inner_;
};

struct Problem {
  ObjectivePtr f;
  Point x0;
};

Problem karcher(unsigned seed) {
  Rng rng(seed);
  const auto H = Manifold::hyperbolic(6, 1.0);
  std::vector<Point> anchors;
  for (int i = 0; i < 10; ++i) anchors.push_back(H.random_point(rng, 0.5));
  auto f = make_karcher(H, anchors, std::vector<double>(10, 0.1), 0.5);
  return {f, H.exp_map(*f->optimum(), H.random_tangent(rng, *f->optimum(), 0.5))};
}

SolverConfig nesterov(const Objective& f, double sigma = 0.7) {
  SolverConfig cfg;
  cfg.strategy.kind = StrategyKind::nesterov_grad;
  cfg.strategy.sigma = sigma;
  cfg.strategy.lambda = sigma * sigma / (2 * f.L());
  return cfg;
}

}  // namespace

TEST_CASE("coefficient formulas against closed forms") {
  // a^2 = lambda (A' + mu (a A + A A')) at A = mu = lambda = 1: (3 + sqrt 17)/2.
  CHECK(euclid_coeff(1.0, 1.0, 1.0) == doctest::Approx(3.5615528128088303).epsilon(1e-15));
  CHECK(euclid_coeff(0.0, 0.0, 2.0) == doctest::Approx(2.0));
  // 2 theta^2 - 4 theta + 1 = 0 at B = mu = lambda = delta = 1, A = 2.
  CHECK(riemann_theta(1.0, 2.0, 1.0, 1.0, 1.0) ==
        doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(riemann_theta(1.0, 0.0, 1.0, 1.0, 1.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(riemann_theta(1.0, 1.0, 1.0, 1.0, 0.5), ContractViolation);
  CHECK_THROWS_AS(euclid_coeff(-1.0, 1.0, 1.0), ContractViolation);
  CHECK(xi_fixed_point(1.0, 1.0) == doctest::Approx(std::sqrt(0.5)));
  CHECK(initial_xi(1.0, 0.5, 1.0, 1.0) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("euclid_coeff solves its defining quadratic") {
  for (double A : {0.0, 0.3, 10.0, 1e6})
    for (double mu : {0.0, 1e-3, 1.0})
      for (double lambda : {1e-4, 0.5, 3.0}) {
        const double a = euclid_coeff(A, mu, lambda);
        const double A1 = A + a;
        const double lhs = a * a;
        const double rhs = lambda * (A1 + mu * (a * A + A * A1));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
      }
}

TEST_CASE("theta root satisfies the quadratic and lies in (0,1]") {
  Rng rng(50);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  for (int i = 0; i < 200; ++i) {
    const double B = u(rng), A = u(rng), mu = u(rng), lambda = u(rng), delta = 1 + u(rng);
    const double t = riemann_theta(B, A, mu, lambda, delta);
    const double ml = mu * lambda;
    const double q = t * t * B * (1 + ml) - t * (B * (2 + ml) + 0.5 * mu * ml * delta * A) + B;
    CHECK(t > 0);
    CHECK(t <= 1);
    CHECK(std::abs(q) < 1e-12 * (B * (2 + ml) + 0.5 * mu * ml * delta * A));
  }
}

TEST_CASE("euclidean trajectory keeps its invariants") {
  Rng rng(51);
  const auto E = Manifold::euclidean(10);
  auto f = make_conditioned_quadratic(E, E.random_point(rng, 1.0), 1.0, 200.0, 1.0, rng);
  SolverConfig cfg = nesterov(*f);
  cfg.algorithm = Algorithm::euclidean;
  cfg.max_iters = 150;
  const RunResult r = run(*f, E.random_point(rng, 4.0), cfg);
  REQUIRE(r.trace.size() == 151);
  const double p0 = r.trace[0].potential;
  for (size_t k = 1; k < r.trace.size(); ++k) {
    const auto& t = r.trace[k];
    const auto& prev = r.trace[k - 1];
    CHECK(t.potential <= prev.potential * (1 + 1e-10));
    CHECK(t.f_gap <= p0 / t.A);
    CHECK(t.B == doctest::Approx(0.5 * (1 + t.A)));
    CHECK(t.theta == doctest::Approx((1 + prev.A) / (1 + t.A)));
    CHECK(t.delta == 1.0);
  }
  for (const auto& d : r.diagnostics) CHECK(d.margin_shortfall <= 0);
}

TEST_CASE("riemannian method with K = 0 reproduces the euclidean one") {
  Rng rng(52);
  const auto E = Manifold::euclidean(8);
  auto f = make_conditioned_quadratic(E, E.random_point(rng, 1.0), 0.5, 50.0, 1.0, rng);
  SolverConfig cfg = nesterov(*f);
  cfg.B0 = 0.5 * (1 + f->mu() * cfg.A0);
  cfg.max_iters = 60;
  const Point x0 = E.random_point(rng, 2.0);
  cfg.algorithm = Algorithm::euclidean;
  const RunResult a = run(*f, x0, cfg);
  cfg.algorithm = Algorithm::riemannian;
  const RunResult b = run(*f, x0, cfg);
  CHECK((a.final_state.x.coords - b.final_state.x.coords).norm() < 1e-12);
  CHECK((a.final_state.z.coords - b.final_state.z.coords).norm() < 1e-12);
  for (size_t k = 0; k < a.trace.size(); ++k)
    CHECK(a.trace[k].A == doctest::Approx(b.trace[k].A).epsilon(1e-12));
}

TEST_CASE("riemannian trajectory: xi recursion, y = y', distortion validity") {
  const auto p = karcher(53);
  SolverConfig cfg = nesterov(*p.f);
  cfg.max_iters = 120;
  const RunResult r = run(*p.f, p.x0, cfg);
  CHECK(r.trace[0].xi == doctest::Approx(xi_fixed_point(p.f->mu(), cfg.strategy.lambda)));
  for (size_t k = 1; k < r.trace.size(); ++k) {
    CHECK(r.trace[k].xi_recursion_residual <= 1e-10);
    CHECK(r.trace[k].y_yprime_gap <= 1e-9);
    CHECK(r.trace[k].delta >= 1.0);
    CHECK(r.trace[k].potential <= r.trace[k - 1].potential + r.diagnostics[k - 1].potential_tolerance);
  }
  for (const auto& d : r.diagnostics) {
    CHECK(d.distortion_excess <= 1e-9);
    CHECK(d.w_to_y == 0.0);
    CHECK(d.theory_applies);
  }
  CHECK(r.trace.back().f_gap < 1e-3 * r.trace[0].f_gap);
}

TEST_CASE("raxgd records the additional distortion within its bound") {
  const auto p = karcher(54);
  SolverConfig cfg;
  cfg.strategy.kind = StrategyKind::raxgd;
  cfg.strategy.sigma = 0.5;
  cfg.strategy.lambda = 0.5 / p.f->L();
  cfg.w_rule = WRule::strategy_determined;
  cfg.max_iters = 80;
  const RunResult r = run(*p.f, p.x0, cfg);
  for (const auto& d : r.diagnostics) {
    CHECK(d.addis_excess <= 1e-9);
    CHECK_FALSE(d.theory_applies);
  }
  CHECK_THROWS_AS(riemann_step(initial_state(*p.f, p.x0, cfg), *p.f, cfg.strategy,
                               WRule::y_anchored),
                  ValidationError);
}

TEST_CASE("distance to geodesic") {
  const auto H = Manifold::hyperbolic(2, 1.0);
  const Point x = H.from_chart((Vec(2) << -1.0, 0.0).finished());
  const Point z = H.from_chart((Vec(2) << 1.0, 0.0).finished());
  const Point w = H.from_chart((Vec(2) << 0.0, 0.7).finished());
  // The geodesic through x and z passes through the origin, which is the foot point of w.
  CHECK(distance_to_geodesic(H, w, x, z) == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(distance_to_geodesic(H, x, x, z) < 1e-9);
}

TEST_CASE("gradient descent baseline") {
  const auto p = karcher(55);
  const RunResult r = rgd_baseline(*p.f, p.x0, 1.0 / p.f->L(), 50, 0.0);
  REQUIRE(r.trace.size() == 51);
  for (size_t k = 1; k < r.trace.size(); ++k) {
    CHECK(r.trace[k].f_gap <= r.trace[k - 1].f_gap + 1e-15);
    CHECK(r.trace[k].potential == r.trace[k].f_gap);
  }
  CHECK_THROWS_AS(rgd_baseline(*p.f, p.x0, 2.0 / p.f->L(), 5, 0.0), ValidationError);
  const RunResult t = rgd_baseline(*p.f, p.x0, 1.0 / p.f->L(), 10000, 1e-8);
  CHECK(t.iterations_to_target > 0);
  CHECK(t.trace.back().f_gap <= 1e-8);
}

TEST_CASE("run boundaries") {
  const auto p = karcher(56);
  SolverConfig cfg = nesterov(*p.f);
  cfg.max_iters = 0;
  const RunResult r = run(*p.f, p.x0, cfg);
  CHECK(r.trace.size() == 1);
  CHECK(r.trace[0].potential ==
        doctest::Approx(r.trace[0].f_gap + 0.5 * p.f->mu() *
                                               std::pow(p.f->manifold().distance(p.x0, *p.f->optimum()), 2)));
  cfg.max_iters = -1;
  CHECK_THROWS_AS(run(*p.f, p.x0, cfg), ValidationError);
  cfg.max_iters = 1000;
  cfg.target_gap = 1e-6;
  const RunResult s = run(*p.f, p.x0, cfg);
  CHECK(s.iterations_to_target == s.trace.back().k);
  CHECK(s.trace.back().f_gap <= 1e-6);
  CHECK(s.trace[s.trace.size() - 2].f_gap > 1e-6);
}

TEST_CASE("enforced checks reject an objective with an understated L") {
  const auto p = karcher(57);
  auto lying = std::make_shared<Misdeclared>(p.f, p.f->mu(), p.f->L() / 8);
  SolverConfig cfg = nesterov(*lying);
  cfg.max_iters = 50;
  CHECK_THROWS_AS(run(*lying, p.x0, cfg), CertificateError);
  cfg.checks = CheckPolicy::record;
  cfg.max_iters = 3;
  const RunResult r = run(*lying, p.x0, cfg);
  CHECK(r.worst_residual > 0);
}
