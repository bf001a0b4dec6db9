#pragma once

#include <Eigen/Dense>
#include <random>

namespace ahpe {

using Vec = Eigen::VectorXd;
using Rng = std::mt19937_64;

// Ambient coordinates: R^d for euclidean, R^{d+1} on the hyperboloid
// <x,x>_M = -1/K, x_0 > 0 for hyperbolic.
struct Point {
  Vec coords;
};

struct TangentVector {
  Point base;
  Vec vec;
};

class Manifold {
 public:
  enum class Kind { euclidean, hyperbolic };

  static Manifold euclidean(int dim);
  static Manifold hyperbolic(int dim, double curvature);

  Kind kind() const { return kind_; }
  bool is_flat() const { return kind_ == Kind::euclidean; }
  int dim() const { return dim_; }
  int ambient_dim() const { return is_flat() ? dim_ : dim_ + 1; }
  // K in sectional curvature -K; zero for euclidean.
  double curvature() const { return K_; }
  bool same_as(const Manifold& o) const;

  Point origin() const;

  // Re-projects small constraint drift, throws ValidationError on large drift.
  Point validate(const Point& x) const;
  double constraint_drift(const Point& x) const;
  void check_tangent(const TangentVector& v) const;

  // Riemannian inner product of two ambient vectors tangent at the same point.
  double dot(const Vec& u, const Vec& v) const;
  double inner(const TangentVector& u, const TangentVector& v) const;
  double norm(const Vec& v) const;
  // Uses the base point; avoids the cancellation in <v,v>_M when the
  // base is far from the origin.
  double norm(const TangentVector& v) const { return norm_at(v.base, v.vec); }
  double norm_at(const Point& x, const Vec& v) const;

  TangentVector zero(const Point& x) const;
  TangentVector project_tangent(const Point& x, const Vec& v) const;

  Point exp_map(const Point& x, const TangentVector& v) const;
  TangentVector log_map(const Point& x, const Point& y) const;
  TangentVector transport(const Point& x, const Point& y,
                          const TangentVector& v) const;
  double distance(const Point& x, const Point& y) const;
  double tangent_distance(const Point& w, const Point& x,
                          const Point& y) const;
  Point geodesic_interpolate(const Point& x, const Point& y, double t) const;

  // Point at exp_origin(u) for u in R^d (spatial chart around the origin).
  Point from_chart(const Vec& u) const;
  Point random_point(Rng& rng, double max_radius) const;
  Point random_point_near(Rng& rng, const Point& c, double max_radius) const;
  TangentVector random_tangent(Rng& rng, const Point& x, double norm) const;

 private:
  Manifold(Kind kind, int dim, double K);
  void check_base(const Point& x, const TangentVector& v) const;
  Point canonical(Vec c) const;

  Kind kind_;
  int dim_;
  double K_;
  double R_;  // 1/sqrt(K)
};

double minkowski(const Vec& u, const Vec& v);

}  // namespace ahpe
