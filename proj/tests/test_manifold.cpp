#include <doctest.h>

#include <cmath>

#include "ahpe/errors.hpp"
#include "ahpe/manifold.hpp"

using namespace ahpe;

namespace {

Point lift(const Manifold& m, std::initializer_list<double> spatial) {
  Vec c(spatial.size() + 1);
  int i = 1;
  for (double s : spatial) c[i++] = s;
  c[0] = std::sqrt(1.0 / m.curvature() + c.tail(c.size() - 1).squaredNorm());
  return Point{c};
}

// Geodesic and parallel-transport ODE on the hyperboloid, integrated with
// RK4: x'' = K<x',x'> x and V' = K<x',V> x.
struct OdeState {
  Vec x, dx, V;
};

OdeState ode_rhs(const OdeState& s, double K) {
  return {s.dx, K * minkowski(s.dx, s.dx) * s.x, K * minkowski(s.dx, s.V) * s.x};
}

OdeState axpy(const OdeState& s, double h, const OdeState& k) {
  return {s.x + h * k.x, s.dx + h * k.dx, s.V + h * k.V};
}

OdeState integrate(OdeState s, double K, int steps) {
  const double h = 1.0 / steps;
  for (int i = 0; i < steps; ++i) {
    const auto k1 = ode_rhs(s, K);
    const auto k2 = ode_rhs(axpy(s, h / 2, k1), K);
    const auto k3 = ode_rhs(axpy(s, h / 2, k2), K);
    const auto k4 = ode_rhs(axpy(s, h, k3), K);
    s.x += h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
    s.dx += h / 6 * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx);
    s.V += h / 6 * (k1.V + 2 * k2.V + 2 * k3.V + k4.V);
  }
  return s;
}

}  // namespace

TEST_CASE("hyperbolic distance and log against high-precision values") {
  const auto H = Manifold::hyperbolic(3, 2.0);
  const Point x = lift(H, {0.3, -0.4, 0.1});
  const Point y = lift(H, {-1.2, 0.5, 0.7});
  CHECK(H.distance(x, y) == doctest::Approx(1.428134114548568211).epsilon(1e-14));
  const Vec lg = H.log_map(x, y).vec;
  const double expect[] = {-0.93062161847283776719, -1.2823711855622471549,
                           1.1096457616140468636, 0.17272542394820029126};
  for (int i = 0; i < 4; ++i) CHECK(lg[i] == doctest::Approx(expect[i]).epsilon(1e-13));
  CHECK(H.norm(lg) == doctest::Approx(1.428134114548568211).epsilon(1e-14));
}

TEST_CASE("exp at the origin of the unit hyperboloid") {
  const auto H = Manifold::hyperbolic(2, 1.0);
  const Point o = H.origin();
  Vec v(3);
  v << 0.0, 1.0, 0.0;
  const Point p = H.exp_map(o, TangentVector{o, v});
  CHECK(p.coords[0] == doctest::Approx(std::cosh(1.0)).epsilon(1e-15));
  CHECK(p.coords[1] == doctest::Approx(std::sinh(1.0)).epsilon(1e-15));
  CHECK(p.coords[2] == doctest::Approx(0.0));
}

TEST_CASE("exp and transport agree with the integrated geodesic ODE") {
  Rng rng(11);
  for (double K : {0.5, 1.0, 3.0}) {
    const auto H = Manifold::hyperbolic(4, K);
    for (int trial = 0; trial < 5; ++trial) {
      const Point x = H.random_point(rng, 1.0);
      const TangentVector v = H.random_tangent(rng, x, 1.5);
      const TangentVector u = H.random_tangent(rng, x, 0.7);
      const OdeState end = integrate({x.coords, v.vec, u.vec}, K, 4000);
      const Point y = H.exp_map(x, v);
      CHECK((y.coords - end.x).norm() < 1e-9 * (1 + end.x.norm()));
      const Vec pt = H.transport(x, y, u).vec;
      CHECK((pt - end.V).norm() < 1e-9 * (1 + end.V.norm()));
    }
  }
}

TEST_CASE("exp/log round trip and log norm equals distance") {
  Rng rng(12);
  for (const auto& m : {Manifold::euclidean(5), Manifold::hyperbolic(5, 1.0),
                        Manifold::hyperbolic(5, 4.0)}) {
    for (int i = 0; i < 200; ++i) {
      const Point x = m.random_point(rng, 2.0);
      const Point y = m.random_point(rng, 2.0);
      const TangentVector l = m.log_map(x, y);
      const Point back = m.exp_map(x, l);
      // Hyperboloid coordinates carry absolute error ~ eps |x|, amplified by
      // cosh(sqrt(K) d) through exp.
      const double cond = std::cosh(std::sqrt(m.curvature()) * m.distance(x, y)) *
                          (1.0 + x.coords.lpNorm<Eigen::Infinity>());
      CHECK(m.distance(back, y) < 1e-13 * cond);
      CHECK(std::abs(m.norm(l) - m.distance(x, y)) < 1e-12 * (1 + m.distance(x, y)));
    }
  }
}

TEST_CASE("transport is an isometry and maps log_x y to -log_y x") {
  Rng rng(13);
  const auto H = Manifold::hyperbolic(6, 1.5);
  for (int i = 0; i < 100; ++i) {
    const Point x = H.random_point(rng, 1.5);
    const Point y = H.random_point(rng, 1.5);
    const TangentVector u = H.random_tangent(rng, x, 1.0);
    const TangentVector w = H.random_tangent(rng, x, 2.0);
    const TangentVector pu = H.transport(x, y, u);
    const TangentVector pw = H.transport(x, y, w);
    CHECK(std::abs(H.inner(pu, pw) - H.inner(u, w)) < 1e-12);
    CHECK(std::abs(minkowski(pu.vec, y.coords)) < 1e-12 * y.coords.norm());
    const Vec a = H.transport(x, y, H.log_map(x, y)).vec;
    CHECK((a + H.log_map(y, x).vec).norm() < 1e-11);
  }
}

TEST_CASE("log map at any base point does not expand distances") {
  Rng rng(14);
  const auto H = Manifold::hyperbolic(3, 1.0);
  for (int i = 0; i < 500; ++i) {
    const Point w = H.random_point(rng, 2.0);
    const Point x = H.random_point(rng, 2.0);
    const Point y = H.random_point(rng, 2.0);
    CHECK(H.tangent_distance(w, x, y) <= H.distance(x, y) + 1e-12);
  }
  const Point x = H.random_point(rng, 1.0);
  const Point y = H.random_point(rng, 1.0);
  CHECK(H.tangent_distance(x, x, y) == doctest::Approx(H.distance(x, y)).epsilon(1e-13));
}

TEST_CASE("distance is accurate for nearly coincident points") {
  const auto H = Manifold::hyperbolic(2, 1.0);
  Vec u(2);
  u << 0.4, -0.2;
  const Point x = H.from_chart(u);
  // exp along a tiny tangent gives a second point at known distance.
  const TangentVector t = H.project_tangent(x, (Vec(3) << 0.0, 3e-11, 4e-11).finished());
  const Point y = H.exp_map(x, t);
  CHECK(H.distance(x, y) == doctest::Approx(H.norm(t)).epsilon(1e-6));
  CHECK(H.distance(x, x) == 0.0);
}

TEST_CASE("geodesic interpolation") {
  Rng rng(15);
  const auto H = Manifold::hyperbolic(4, 2.0);
  const Point x = H.random_point(rng, 1.0);
  const Point y = H.random_point(rng, 1.0);
  CHECK(H.geodesic_interpolate(x, y, 0.0).coords == x.coords);
  CHECK(H.geodesic_interpolate(x, y, 1.0).coords == y.coords);
  const Point m = H.geodesic_interpolate(x, y, 0.25);
  CHECK(H.distance(x, m) == doctest::Approx(0.25 * H.distance(x, y)).epsilon(1e-12));
  CHECK(H.distance(m, y) == doctest::Approx(0.75 * H.distance(x, y)).epsilon(1e-12));
  CHECK_THROWS_AS(H.geodesic_interpolate(x, y, 1.5), ContractViolation);
  CHECK_THROWS_AS(H.geodesic_interpolate(x, y, -0.1), ContractViolation);
}

TEST_CASE("euclidean operations are vector arithmetic") {
  const auto E = Manifold::euclidean(3);
  const Point x{(Vec(3) << 1, 2, 3).finished()};
  const Point y{(Vec(3) << -1, 0, 5).finished()};
  CHECK(E.log_map(x, y).vec == (y.coords - x.coords));
  CHECK(E.distance(x, y) == doctest::Approx(std::sqrt(12.0)));
  const TangentVector v{x, (Vec(3) << 1, 1, 1).finished()};
  CHECK(E.transport(x, y, v).vec == v.vec);
  CHECK(E.exp_map(x, v).coords == (Vec(3) << 2, 3, 4).finished());
  CHECK(E.tangent_distance(x, x, y) == E.distance(x, y));
}

TEST_CASE("contract violations and validation") {
  Rng rng(16);
  const auto H = Manifold::hyperbolic(3, 1.0);
  const Point x = H.random_point(rng, 1.0);
  const Point y = H.random_point(rng, 1.0);
  const TangentVector v = H.random_tangent(rng, x, 0.3);
  CHECK_THROWS_AS(H.exp_map(y, v), ContractViolation);
  CHECK_THROWS_AS(H.transport(y, x, v), ContractViolation);

  Point drifted = x;
  drifted.coords[1] += 1e-7;
  const Point fixed = H.validate(drifted);
  CHECK(H.constraint_drift(drifted) > 1e-9);
  CHECK(H.constraint_drift(fixed) < 1e-15);
  Point far = x;
  far.coords[1] += 1e-2;
  CHECK_THROWS_AS(H.validate(far), ValidationError);
  CHECK_THROWS_AS(Manifold::hyperbolic(3, 0.0), ValidationError);
  CHECK(H.same_as(Manifold::hyperbolic(3, 1.0)));
  CHECK_FALSE(H.same_as(Manifold::hyperbolic(3, 2.0)));
}
