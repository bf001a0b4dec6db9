#include "ahpe/manifold.hpp"

#include <cmath>
#include <string>

#include "ahpe/errors.hpp"

namespace ahpe {

namespace {

constexpr double kReprojectDrift = 1e-9;
constexpr double kRejectDrift = 1e-6;

// sinh(s)/s and s/sinh(s), with series near zero.
double sinhc(double s) {
  if (std::abs(s) < 1e-4) return 1.0 + s * s / 6.0 + s * s * s * s / 120.0;
  return std::sinh(s) / s;
}

double inv_sinhc(double s) {
  if (std::abs(s) < 1e-4) return 1.0 - s * s / 6.0 + 7.0 * s * s * s * s / 360.0;
  return s / std::sinh(s);
}

}  // namespace

double minkowski(const Vec& u, const Vec& v) {
  return -u[0] * v[0] + u.tail(u.size() - 1).dot(v.tail(v.size() - 1));
}

Manifold::Manifold(Kind kind, int dim, double K)
    : kind_(kind), dim_(dim), K_(K), R_(K > 0 ? 1.0 / std::sqrt(K) : 0.0) {
  if (dim < 1) throw ValidationError("manifold dimension must be positive");
  if (kind == Kind::hyperbolic && !(K > 0 && std::isfinite(K)))
    throw ValidationError("hyperbolic curvature K must be positive");
}

Manifold Manifold::euclidean(int dim) { return Manifold(Kind::euclidean, dim, 0.0); }

Manifold Manifold::hyperbolic(int dim, double curvature) {
  return Manifold(Kind::hyperbolic, dim, curvature);
}

bool Manifold::same_as(const Manifold& o) const {
  return kind_ == o.kind_ && dim_ == o.dim_ && K_ == o.K_;
}

Point Manifold::origin() const {
  Vec c = Vec::Zero(ambient_dim());
  if (!is_flat()) c[0] = R_;
  return {c};
}

Point Manifold::canonical(Vec c) const {
  if (!is_flat()) c[0] = std::sqrt(R_ * R_ + c.tail(dim_).squaredNorm());
  return {std::move(c)};
}

double Manifold::constraint_drift(const Point& x) const {
  if (x.coords.size() != ambient_dim()) return INFINITY;
  if (is_flat()) return x.coords.allFinite() ? 0.0 : INFINITY;
  if (!x.coords.allFinite() || x.coords[0] <= 0) return INFINITY;
  return std::abs(minkowski(x.coords, x.coords) + R_ * R_) /
         (R_ * R_ + x.coords.tail(dim_).squaredNorm());
}

Point Manifold::validate(const Point& x) const {
  const double drift = constraint_drift(x);
  if (drift > kRejectDrift)
    throw ValidationError("point is not on the manifold (constraint drift " +
                          std::to_string(drift) + ")");
  if (drift > kReprojectDrift) return canonical(x.coords);
  return x;
}

void Manifold::check_base(const Point& x, const TangentVector& v) const {
  const double scale = 1.0 + x.coords.lpNorm<Eigen::Infinity>();
  if (v.base.coords.size() != x.coords.size() ||
      (v.base.coords - x.coords).lpNorm<Eigen::Infinity>() > 1e-12 * scale)
    throw ContractViolation("tangent vector is based at a different point");
  if (v.vec.size() != ambient_dim())
    throw ContractViolation("tangent vector has wrong ambient dimension");
}

void Manifold::check_tangent(const TangentVector& v) const {
  if (is_flat()) return;
  const double n = std::sqrt(v.vec.squaredNorm());
  const double off = std::abs(minkowski(v.base.coords, v.vec));
  if (off > 1e-9 * (1.0 + n) * (R_ + v.base.coords.norm()))
    throw ValidationError("vector is not tangent at its base point");
}

double Manifold::dot(const Vec& u, const Vec& v) const {
  return is_flat() ? u.dot(v) : minkowski(u, v);
}

double Manifold::inner(const TangentVector& u, const TangentVector& v) const {
  check_base(u.base, v);
  return dot(u.vec, v.vec);
}

double Manifold::norm(const Vec& v) const {
  if (is_flat()) return v.norm();
  return std::sqrt(std::max(0.0, minkowski(v, v)));
}

TangentVector Manifold::zero(const Point& x) const {
  return {x, Vec::Zero(ambient_dim())};
}

TangentVector Manifold::project_tangent(const Point& x, const Vec& v) const {
  if (is_flat()) return {x, v};
  return {x, v + K_ * minkowski(x.coords, v) * x.coords};
}

double Manifold::norm_at(const Point& x, const Vec& v) const {
  if (is_flat()) return v.norm();
  // Split the spatial part of v along and across the spatial part of x; the
  // time component is implied by tangency, so |v|^2 = |v_perp|^2 + a^2 R^2 / x0^2.
  const auto xs = x.coords.tail(dim_);
  const auto vs = v.tail(dim_);
  const double nx2 = xs.squaredNorm();
  if (nx2 == 0.0) return vs.norm();
  const double proj = xs.dot(vs) / nx2;
  const double perp2 = (vs - proj * xs).squaredNorm();
  const double along = proj * std::sqrt(nx2) * R_ / x.coords[0];
  return std::sqrt(perp2 + along * along);
}

Point Manifold::exp_map(const Point& x, const TangentVector& v) const {
  check_base(x, v);
  if (is_flat()) return {x.coords + v.vec};
  if (constraint_drift(x) > kRejectDrift)
    throw ValidationError("exp_map: base point is not on the manifold");
  const double r = norm_at(x, v.vec);
  const double s = r / R_;
  Vec c = std::cosh(s) * x.coords + sinhc(s) * v.vec;
  return canonical(std::move(c));
}

TangentVector Manifold::log_map(const Point& x, const Point& y) const {
  if (is_flat()) return {x, y.coords - x.coords};
  if (constraint_drift(x) > kRejectDrift || constraint_drift(y) > kRejectDrift)
    throw ValidationError("log_map: point is not on the manifold");
  const Vec diff = y.coords - x.coords;
  const double c2 = std::max(0.0, minkowski(diff, diff));
  const double c = std::sqrt(c2);
  const double d = 2.0 * R_ * std::asinh(c / (2.0 * R_));
  Vec u = diff - (c2 / (2.0 * R_ * R_)) * x.coords;
  u *= inv_sinhc(d / R_);
  return project_tangent(x, u);
}

TangentVector Manifold::transport(const Point& x, const Point& y,
                                  const TangentVector& v) const {
  check_base(x, v);
  if (is_flat()) return {y, v.vec};
  const double denom = R_ * R_ - minkowski(x.coords, y.coords);
  Vec out = v.vec + (minkowski(y.coords, v.vec) / denom) * (x.coords + y.coords);
  return project_tangent(y, out);
}

double Manifold::distance(const Point& x, const Point& y) const {
  const Vec diff = y.coords - x.coords;
  if (is_flat()) return diff.norm();
  const double c = std::sqrt(std::max(0.0, minkowski(diff, diff)));
  return 2.0 * R_ * std::asinh(c / (2.0 * R_));
}

double Manifold::tangent_distance(const Point& w, const Point& x,
                                  const Point& y) const {
  if (is_flat()) return (x.coords - y.coords).norm();
  return norm_at(w, log_map(w, x).vec - log_map(w, y).vec);
}

Point Manifold::geodesic_interpolate(const Point& x, const Point& y,
                                     double t) const {
  if (!(t >= 0.0 && t <= 1.0))
    throw ContractViolation("geodesic_interpolate: t must lie in [0,1]");
  if (t == 0.0) return x;
  if (t == 1.0) return y;
  if (is_flat()) return {(1.0 - t) * x.coords + t * y.coords};
  TangentVector v = log_map(x, y);
  v.vec *= t;
  return exp_map(x, v);
}

Point Manifold::from_chart(const Vec& u) const {
  if (u.size() != dim_) throw ContractViolation("chart vector has wrong dimension");
  if (is_flat()) return {u};
  Point o = origin();
  Vec v = Vec::Zero(ambient_dim());
  v.tail(dim_) = u;
  return exp_map(o, {o, v});
}

Point Manifold::random_point(Rng& rng, double max_radius) const {
  return random_point_near(rng, origin(), max_radius);
}

Point Manifold::random_point_near(Rng& rng, const Point& c,
                                  double max_radius) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double r = max_radius * std::pow(unif(rng), 1.0 / dim_);
  return exp_map(c, random_tangent(rng, c, r));
}

TangentVector Manifold::random_tangent(Rng& rng, const Point& x,
                                       double n) const {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec raw(ambient_dim());
  for (int i = 0; i < raw.size(); ++i) raw[i] = g(rng);
  TangentVector v = project_tangent(x, raw);
  const double len = norm_at(x, v.vec);
  if (len > 0) v.vec *= n / len;
  return v;
}

}  // namespace ahpe
