#include "ahpe/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ahpe/errors.hpp"

namespace ahpe {

namespace {

// sqrt(K) r coth(sqrt(K) r), the largest Hessian eigenvalue of d^2/2 at
// distance r on curvature -K.
double sqdist_smoothness(double K, double r) {
  const double a = std::sqrt(K) * r;
  if (a < 1e-8) return 1.0;
  return a / std::tanh(a);
}

class WeightedSquaredDistance final : public Objective {
 public:
  WeightedSquaredDistance(const Manifold& m, std::vector<Point> anchors,
                          std::vector<double> weights, double mu, double L,
                          double reach)
      : Objective(m, mu, L),
        anchors_(std::move(anchors)),
        weights_(std::move(weights)),
        reach_(reach) {}

  std::string kind() const override {
    return anchors_.size() == 1 ? "squared_distance" : "karcher";
  }

  double value(const Point& x) const override {
    double f = 0.0;
    for (size_t i = 0; i < anchors_.size(); ++i) {
      const double d = m_.distance(x, anchors_[i]);
      f += 0.5 * weights_[i] * d * d;
    }
    return f;
  }

  TangentVector gradient(const Point& x) const override {
    Vec g = Vec::Zero(m_.ambient_dim());
    for (size_t i = 0; i < anchors_.size(); ++i)
      g -= weights_[i] * m_.log_map(x, anchors_[i]).vec;
    return m_.project_tangent(x, g);
  }

  bool in_domain(const Point& x) const override {
    for (const auto& p : anchors_)
      if (m_.distance(x, p) > reach_ * (1 + 1e-12)) return false;
    return true;
  }

  void set_domain(Point c, double r) {
    center_ = std::move(c);
    radius_ = r;
  }
  void set_optimum(Point x, double f, bool numerical) {
    opt_ = std::move(x);
    fopt_ = f;
    opt_numerical_ = numerical;
  }

 private:
  std::vector<Point> anchors_;
  std::vector<double> weights_;
  double reach_;
};

class EuclideanQuadratic final : public Objective {
 public:
  EuclideanQuadratic(const Manifold& m, QuadraticForm q, double mu, double L)
      : Objective(m, mu, L), q_(std::move(q)) {
    center_ = {q_.p};
    opt_ = Point{q_.p};
    fopt_ = 0.0;
  }
  std::string kind() const override { return "quadratic"; }
  double value(const Point& x) const override {
    const Vec d = x.coords - q_.p;
    return 0.5 * d.dot(q_.H * d);
  }
  TangentVector gradient(const Point& x) const override {
    return {x, q_.H * (x.coords - q_.p)};
  }
  bool in_domain(const Point&) const override { return true; }
  const QuadraticForm* euclidean_quadratic() const override { return &q_; }

 private:
  QuadraticForm q_;
};

class BoostedQuadratic final : public Objective {
 public:
  BoostedQuadratic(const Manifold& m, const Point& p, Vec h, double D)
      : Objective(m, h.minCoeff(), 0.0), h_(std::move(h)) {
    L_ = h_.maxCoeff() * std::cosh(2.0 * std::sqrt(m.curvature()) * D);
    to_frame_ = lorentz_boost_inverse(m, p);
    from_frame_ = lorentz_boost(m, p);
    center_ = p;
    radius_ = D;
    opt_ = p;
    fopt_ = 0.0;
  }
  std::string kind() const override { return "quadratic"; }
  double value(const Point& x) const override {
    const Vec u = (to_frame_ * x.coords).tail(m_.dim());
    return 0.5 * u.dot(h_.cwiseProduct(u));
  }
  TangentVector gradient(const Point& x) const override {
    const Vec xf = to_frame_ * x.coords;
    Vec g = Vec::Zero(m_.ambient_dim());
    g.tail(m_.dim()) = h_.cwiseProduct(xf.tail(m_.dim()));
    // Riemannian gradient of the ambient function in the boosted frame.
    Vec rg = g + m_.curvature() * xf.dot(g) * xf;
    return m_.project_tangent(x, from_frame_ * rg);
  }
  bool in_domain(const Point& x) const override {
    return m_.distance(x, center_) <= radius_ * (1 + 1e-12);
  }

 private:
  Vec h_;
  Eigen::MatrixXd to_frame_;
  Eigen::MatrixXd from_frame_;
};

Point karcher_mean(const Manifold& m, const Objective& f, Point x) {
  for (int it = 0; it < 100000; ++it) {
    const TangentVector g = f.gradient(x);
    const double gn = m.norm(g);
    if (gn <= 1e-12) return x;
    const double fx = f.value(x);
    double t = 1.0;
    Point next;
    for (int bt = 0; bt < 60; ++bt) {
      TangentVector step = g;
      step.vec *= -t;
      next = m.exp_map(x, step);
      if (f.value(next) <= fx - 0.5 * t * gn * gn) break;
      t *= 0.5;
    }
    if (t < 1e-15) break;
    x = next;
  }
  const double gn = m.norm(f.gradient(x));
  if (gn > 1e-10)
    throw NumericError("karcher mean did not converge (gradient norm " +
                       std::to_string(gn) + ")");
  return x;
}

}  // namespace

ObjectivePtr make_squared_distance(const Manifold& m, const Point& p, double D) {
  if (!(D > 0)) throw ValidationError("domain radius D must be positive");
  const Point pv = m.validate(p);
  auto f = std::make_shared<WeightedSquaredDistance>(
      m, std::vector<Point>{pv}, std::vector<double>{1.0}, 1.0,
      sqdist_smoothness(m.curvature(), D), D);
  f->set_domain(pv, D);
  f->set_optimum(pv, 0.0, false);
  return f;
}

ObjectivePtr make_karcher(const Manifold& m, const std::vector<Point>& anchors,
                          const std::vector<double>& weights, double D) {
  if (anchors.empty()) throw ValidationError("karcher objective needs at least one anchor");
  if (weights.size() != anchors.size())
    throw ValidationError("karcher weights must match the number of anchors");
  if (!(D > 0)) throw ValidationError("domain radius D must be positive");
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w > 0)) throw ValidationError("karcher weights must be positive");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12) throw ValidationError("karcher weights must sum to 1");
  std::vector<Point> pts;
  for (const auto& a : anchors) pts.push_back(m.validate(a));
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j)
      if (m.distance(pts[i], pts[j]) > 2.0 * D * (1 + 1e-12))
        throw ValidationError("karcher anchors must lie pairwise within 2D");

  if (pts.size() == 1) return make_squared_distance(m, pts[0], D);

  auto f = std::make_shared<WeightedSquaredDistance>(
      m, pts, weights, 1.0, sqdist_smoothness(m.curvature(), 2.0 * D), 2.0 * D);
  const Point opt = karcher_mean(m, *f, pts[0]);
  f->set_domain(opt, 2.0 * D);
  f->set_optimum(opt, f->value(opt), true);
  return f;
}

ObjectivePtr make_quadratic(const Manifold& m, const Point& p, const Vec& eigenvalues,
                            double D, Rng& rng) {
  if (eigenvalues.size() != m.dim())
    throw ValidationError("quadratic needs one eigenvalue per dimension");
  if (!(eigenvalues.minCoeff() > 0))
    throw ValidationError("quadratic eigenvalues must be positive");
  if (m.is_flat()) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd G(m.dim(), m.dim());
    for (int i = 0; i < G.rows(); ++i)
      for (int j = 0; j < G.cols(); ++j) G(i, j) = g(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    const Eigen::MatrixXd Q = qr.householderQ();
    Eigen::MatrixXd H = Q * eigenvalues.asDiagonal() * Q.transpose();
    H = 0.5 * (H + H.transpose());
    return std::make_shared<EuclideanQuadratic>(
        m, QuadraticForm{H, p.coords}, eigenvalues.minCoeff(), eigenvalues.maxCoeff());
  }
  if (!(D > 0)) throw ValidationError("domain radius D must be positive");
  return std::make_shared<BoostedQuadratic>(m, m.validate(p), eigenvalues, D);
}

ObjectivePtr make_conditioned_quadratic(const Manifold& m, const Point& p, double mu,
                                        double condition, double D, Rng& rng) {
  if (!(mu > 0)) throw ValidationError("quadratic mu must be positive");
  if (!(condition >= 1)) throw ValidationError("condition number must be at least 1");
  double spread = condition;
  if (!m.is_flat()) {
    spread = condition / std::cosh(2.0 * std::sqrt(m.curvature()) * D);
    if (spread < 1)
      throw ValidationError("condition number is below the curvature floor cosh(2 sqrt(K) D)");
  }
  const int d = m.dim();
  Vec h(d);
  for (int i = 0; i < d; ++i) {
    const double t = d == 1 ? 0.0 : double(i) / (d - 1);
    h[i] = mu * std::pow(spread, t);
  }
  return make_quadratic(m, p, h, D, rng);
}

LowerModel LowerModel::at(const Objective& f, const Point& w) {
  return {w, f.value(w), f.gradient(w), f.mu()};
}

double LowerModel::operator()(const Manifold& m, const Point& y) const {
  const TangentVector l = m.log_map(w, y);
  const double n = m.norm(l);
  return fw + m.dot(grad.vec, l.vec) + 0.5 * mu * n * n;
}

Point sample_domain_point(const Objective& f, Rng& rng) {
  const Manifold& m = f.manifold();
  double r = f.domain_radius();
  if (!std::isfinite(r)) r = 10.0;
  for (int tries = 0; tries < 10000; ++tries) {
    Point x = m.random_point_near(rng, f.domain_center(), r);
    if (f.in_domain(x)) return x;
  }
  throw NumericError("could not sample a point in the objective domain");
}

SampleReport check_strong_convexity(const Objective& f, int samples, Rng& rng,
                                    std::optional<double> mu_override) {
  const Manifold& m = f.manifold();
  const double mu = mu_override.value_or(f.mu());
  SampleReport rep;
  for (int s = 0; s < samples; ++s) {
    const Point x = sample_domain_point(f, rng);
    const Point y = sample_domain_point(f, rng);
    const auto [fx, g] = f.eval_grad(x);
    const double d = m.distance(x, y);
    const double lower = fx + m.dot(g.vec, m.log_map(x, y).vec) + 0.5 * mu * d * d;
    rep.max_violation = std::max(rep.max_violation, lower - f.value(y));
    ++rep.samples;
  }
  return rep;
}

SampleReport check_smoothness(const Objective& f, int samples, Rng& rng) {
  const Manifold& m = f.manifold();
  SampleReport rep;
  for (int s = 0; s < samples; ++s) {
    const Point x = sample_domain_point(f, rng);
    const Point y = sample_domain_point(f, rng);
    const TangentVector gx = m.transport(x, y, f.gradient(x));
    const double lhs = m.norm_at(y, gx.vec - f.gradient(y).vec);
    rep.max_violation = std::max(rep.max_violation, lhs - f.L() * m.distance(x, y));
    ++rep.samples;
  }
  return rep;
}

SampleReport check_lower_model(const Objective& f, int samples, Rng& rng) {
  const Manifold& m = f.manifold();
  SampleReport rep;
  for (int s = 0; s < samples; ++s) {
    const LowerModel lm = LowerModel::at(f, sample_domain_point(f, rng));
    const Point y = sample_domain_point(f, rng);
    rep.max_violation = std::max(rep.max_violation, lm(m, y) - f.value(y));
    ++rep.samples;
  }
  return rep;
}

Eigen::MatrixXd lorentz_boost(const Manifold& m, const Point& p) {
  if (m.is_flat()) throw ContractViolation("lorentz_boost needs a hyperbolic manifold");
  const double R = 1.0 / std::sqrt(m.curvature());
  const int d = m.dim();
  const Vec q = p.coords / R;
  const Vec s = q.tail(d);
  Eigen::MatrixXd B(d + 1, d + 1);
  B(0, 0) = q[0];
  B.block(0, 1, 1, d) = s.transpose();
  B.block(1, 0, d, 1) = s;
  B.block(1, 1, d, d) =
      Eigen::MatrixXd::Identity(d, d) + s * s.transpose() / (1.0 + q[0]);
  return B;
}

Eigen::MatrixXd lorentz_boost_inverse(const Manifold& m, const Point& p) {
  Eigen::MatrixXd B = lorentz_boost(m, p);
  Eigen::VectorXd j = Eigen::VectorXd::Ones(B.rows());
  j[0] = -1.0;
  return j.asDiagonal() * B.transpose() * j.asDiagonal();
}

}  // namespace ahpe
