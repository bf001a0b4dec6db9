#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ahpe/manifold.hpp"

namespace ahpe {

// f(x) = 1/2 (x-p)^T H (x-p) on R^d.
struct QuadraticForm {
  Eigen::MatrixXd H;
  Vec p;
};

class Objective {
 public:
  Objective(Manifold m, double mu, double L) : m_(std::move(m)), mu_(mu), L_(L) {}
  virtual ~Objective() = default;

  const Manifold& manifold() const { return m_; }
  double mu() const { return mu_; }
  double L() const { return L_; }

  virtual std::string kind() const = 0;
  virtual double value(const Point& x) const = 0;
  virtual TangentVector gradient(const Point& x) const = 0;
  std::pair<double, TangentVector> eval_grad(const Point& x) const {
    return {value(x), gradient(x)};
  }

  // Region on which the declared L holds.
  virtual bool in_domain(const Point& x) const = 0;
  const Point& domain_center() const { return center_; }
  double domain_radius() const { return radius_; }

  const std::optional<Point>& optimum() const { return opt_; }
  std::optional<double> optimal_value() const { return fopt_; }
  bool optimum_is_numerical() const { return opt_numerical_; }

  virtual const QuadraticForm* euclidean_quadratic() const { return nullptr; }

 protected:
  Manifold m_;
  double mu_;
  double L_;
  Point center_;
  double radius_ = INFINITY;
  std::optional<Point> opt_;
  std::optional<double> fopt_;
  bool opt_numerical_ = false;
};

using ObjectivePtr = std::shared_ptr<const Objective>;

ObjectivePtr make_squared_distance(const Manifold& m, const Point& p, double D);

// Anchors must be pairwise within 2D; the smoothness constant holds on the
// set of points within 2D of every anchor.
ObjectivePtr make_karcher(const Manifold& m, const std::vector<Point>& anchors,
                          const std::vector<double>& weights, double D);

// Euclidean: 1/2 (x-p)^T H (x-p) with eigenvalues of H given in a random
// orthonormal basis. Hyperbolic: 1/2 sum_i h_i u_i^2 where u are the spatial
// coordinates after the Lorentz boost taking p to the origin, valid within
// distance D of p.
ObjectivePtr make_quadratic(const Manifold& m, const Point& p, const Vec& eigenvalues,
                            double D, Rng& rng);
// Eigenvalues log-spaced so that L/mu equals the requested condition number.
ObjectivePtr make_conditioned_quadratic(const Manifold& m, const Point& p, double mu,
                                        double condition, double D, Rng& rng);

struct LowerModel {
  Point w;
  double fw = 0.0;
  TangentVector grad;
  double mu = 0.0;

  static LowerModel at(const Objective& f, const Point& w);
  double operator()(const Manifold& m, const Point& y) const;
};

struct SampleReport {
  int samples = 0;
  double max_violation = 0.0;  // positive means the inequality failed
};

// Rejection-samples a point of the objective's domain.
Point sample_domain_point(const Objective& f, Rng& rng);

SampleReport check_strong_convexity(const Objective& f, int samples, Rng& rng,
                                    std::optional<double> mu_override = {});
SampleReport check_smoothness(const Objective& f, int samples, Rng& rng);
SampleReport check_lower_model(const Objective& f, int samples, Rng& rng);

// Lorentz boost taking the hyperboloid origin to p (and its inverse).
Eigen::MatrixXd lorentz_boost(const Manifold& m, const Point& p);
Eigen::MatrixXd lorentz_boost_inverse(const Manifold& m, const Point& p);

}  // namespace ahpe
