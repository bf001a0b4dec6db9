#include <doctest.h>

#include <cmath>

#include "ahpe/errors.hpp"
#include "ahpe/iprox.hpp"

using namespace ahpe;

namespace {

ObjectivePtr unit_quadratic() {
  Rng rng(40);
  return make_quadratic(Manifold::euclidean(2), Point{Vec::Zero(2)}, Vec::Ones(2), 1.0, rng);
}

Point pt(double a, double b) { return Point{(Vec(2) << a, b).finished()}; }

std::vector<ObjectivePtr> objectives(Rng& rng) {
  const auto H = Manifold::hyperbolic(5, 1.0);
  const auto E = Manifold::euclidean(5);
  std::vector<Point> anchors;
  for (int i = 0; i < 6; ++i) anchors.push_back(H.random_point(rng, 0.5));
  return {make_karcher(H, anchors, std::vector<double>(6, 1.0 / 6), 0.5),
          make_conditioned_quadratic(H, H.random_point(rng, 0.3), 1.0, 30.0, 0.5, rng),
          make_conditioned_quadratic(E, E.random_point(rng, 1.0), 1.0, 50.0, 1.0, rng)};
}

const StrategyKind kFirstOrder[] = {StrategyKind::nesterov_grad, StrategyKind::two_step_grad,
                                    StrategyKind::raxgd, StrategyKind::gen_raxgd};

}  // namespace

// f = |x|^2/2, mu = 1. Values worked by hand.
TEST_CASE("exact prox of the unit quadratic") {
  const auto f = unit_quadratic();
  const auto c = exact_quadratic(*f, pt(2, 0), 1.0);
  CHECK(c.x.coords[0] == doctest::Approx(1.0));
  CHECK(c.x.coords[1] == doctest::Approx(0.0));
  CHECK(c.v.vec[0] == doctest::Approx(1.0));
  CHECK(c.w.coords == c.x.coords);
  CHECK(c.eps == 0.0);
  CHECK(std::abs(c.lhs_residual) < 1e-15);
}

TEST_CASE("nesterov step on the unit quadratic") {
  const auto f = unit_quadratic();
  const auto c = nesterov_grad(*f, pt(2, 0), 0.1, 0.5);
  // x = y - 0.1 y, v = grad f(y) + mu (x - y).
  CHECK(c.x.coords[0] == doctest::Approx(1.8));
  CHECK(c.v.vec[0] == doctest::Approx(1.8));
  CHECK(c.w.coords == pt(2, 0).coords);
  CHECK(c.lhs_residual <= 1e-15);
  CHECK(subgradient_gap(*f, c) < 1e-15);
}

TEST_CASE("two-step strategy takes two gradient steps") {
  const auto f = unit_quadratic();
  const auto c = two_step_grad(*f, pt(2, 0), 0.2);
  CHECK(c.x.coords[0] == doctest::Approx(2.0 * 0.8 * 0.8));
  CHECK(c.w.coords == pt(2, 0).coords);
}

TEST_CASE("certificates hold under the documented step sizes") {
  Rng rng(41);
  for (const auto& f : objectives(rng)) {
    for (auto k : kFirstOrder) {
      CAPTURE(to_string(k));
      Strategy st;
      st.kind = k;
      st.sigma = 0.6;
      st.lambda = max_valid_lambda(k, f->L(), f->mu(), st.sigma);
      if (k == StrategyKind::gen_raxgd) st.offset = random_offset_rule(0.1, 7);
      CHECK_NOTHROW(check_strategy(*f, st));
      for (int i = 0; i < 60; ++i) {
        const Point y = sample_domain_point(*f, rng);
        const auto c = apply_strategy(*f, y, st);
        CHECK(c.lhs_residual <= 1e-12);
        CHECK(subgradient_gap(*f, c) <= 1e-9 * (1 + f->manifold().norm(c.grad_w)));
        if (f->manifold().is_flat()) {
          CHECK(eps_subgradient_check(*f, c, st.lambda, f->mu(), 50, rng) <= 1e-9);
          CHECK(verify_gradient_form(*f, y, c, st.lambda, f->mu()) <=
                1e-12 * (1 + std::abs(f->value(y))));
        }
      }
    }
  }
}

TEST_CASE("gen_raxgd keeps x within the offset ratio") {
  Rng rng(42);
  const auto f = objectives(rng)[1];
  const Manifold& m = f->manifold();
  const double sigma = 0.6, lambda = sigma / (2 * f->L());
  const double rho = gen_raxgd_offset_ratio(sigma, f->mu() * lambda);
  CHECK(rho > 0);
  CHECK(rho <= (1 - sigma) / 3);
  for (int i = 0; i < 50; ++i) {
    const Point y = sample_domain_point(*f, rng);
    const auto c = gen_raxgd(*f, y, lambda, sigma, random_offset_rule(0.9, i));
    CHECK(m.distance(c.w, c.x) <= rho * m.distance(y, c.x) * (1 + 1e-12) + 1e-15);
  }
  const Point y = sample_domain_point(*f, rng);
  CHECK(gen_raxgd(*f, y, lambda, sigma).x.coords == gen_raxgd(*f, y, lambda, sigma).w.coords);
}

TEST_CASE("corrupted certificates and oversized steps are caught") {
  Rng rng(43);
  const auto fs = objectives(rng);
  for (const auto& f : fs) {
    const Point y = sample_domain_point(*f, rng);
    auto c = nesterov_grad(*f, y, 0.1 / f->L(), 0.5);
    // Perturb v across the gradient; the certificate slack is O(lambda^2 |g|^2).
    const Manifold& m = f->manifold();
    Vec dv = m.random_tangent(rng, c.w, 1.0).vec;
    const Vec& g = c.grad_w.vec;
    dv -= m.dot(dv, g) / m.dot(g, g) * g;
    c.v.vec += 5.0 * m.norm(c.grad_w) / m.norm_at(c.w, dv) * dv;
    CHECK(verify(*f, y, c, 0.1 / f->L(), f->mu()) > 0);
  }
  // lambda = 2/L is far beyond sigma^2/(2L); some state must violate.
  const auto& f = fs[2];
  double worst = -INFINITY;
  for (int i = 0; i < 50; ++i) {
    const Point y = sample_domain_point(*f, rng);
    worst = std::max(worst, nesterov_grad(*f, y, 2.0 / f->L(), 0.5).lhs_residual);
  }
  CHECK(worst > 0);
}

TEST_CASE("strategy validation messages") {
  Rng rng(44);
  const auto f = objectives(rng)[2];
  Strategy st;
  st.kind = StrategyKind::nesterov_grad;
  st.sigma = 0.5;
  st.lambda = 0.2 / f->L();
  try {
    check_strategy(*f, st);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()) == "nesterov_grad requires lambda <= sigma^2/(2L)");
  }
  st.kind = StrategyKind::two_step_grad;
  st.lambda = 0.3 / f->L();
  CHECK_THROWS_WITH_AS(check_strategy(*f, st),
                       "two_step_grad requires lambda <= (3/4)^2/(2L) = 9/(32L)",
                       ValidationError);
  st.kind = StrategyKind::raxgd;
  st.lambda = 0.5 / f->L();
  CHECK_NOTHROW(check_strategy(*f, st));
  st.sigma = 1.0;
  CHECK_THROWS_AS(check_strategy(*f, st), ValidationError);
  st.kind = StrategyKind::exact_quadratic;
  CHECK_NOTHROW(check_strategy(*f, st));
  CHECK_THROWS_AS(check_strategy(*objectives(rng)[0], st), ValidationError);
}

TEST_CASE("strategy names") {
  for (auto k : {StrategyKind::exact_quadratic, StrategyKind::nesterov_grad,
                 StrategyKind::two_step_grad, StrategyKind::raxgd, StrategyKind::gen_raxgd})
    CHECK(strategy_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(strategy_from_string("heavy_ball"), ConfigError);
}
