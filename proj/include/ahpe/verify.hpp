#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ahpe/solvers.hpp"

namespace ahpe {

struct CheckResult {
  std::string scope;
  std::string name;
  int samples = 0;
  double max_violation = 0.0;  // amount by which the property fails; <= tolerance passes
  double tolerance = 0.0;
  bool passed() const { return max_violation <= tolerance; }
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool passed() const;
  std::string format() const;
};

using TransportFn = std::function<TangentVector(const Manifold&, const Point&, const Point&,
                                                const TangentVector&)>;

CheckResult check_exp_log_roundtrip(const Manifold& m, int n, Rng& rng);
CheckResult check_log_norm_is_distance(const Manifold& m, int n, Rng& rng);
// |<Gu,Gv> - <u,v>| / (|u||v|); the transport may be replaced for fault injection.
CheckResult check_transport_isometry(const Manifold& m, int n, Rng& rng,
                                     const TransportFn& transport = {});
CheckResult check_tangent_domination(const Manifold& m, int n, Rng& rng);
CheckResult check_constraint_preserved(const Manifold& m, int n, Rng& rng);

// d^2(x,y) <= T_K(d(x,z)) d_z^2(x,y) and d^2_{w2}(z,q) <= T_K(d(w,z)) d^2_w(z,q)
// over random quadruples within the given radius of the origin.
CheckResult check_t_rate_validity(const Manifold& m, int n, Rng& rng, double radius);
// S_K(r) <= c K r^2 on K r^2 <= 1. S_K(r)/(K r^2) increases with r, so the
// smallest valid c is S_1(1) = 1/e; c = 1/3 fails for every r > 0.
CheckResult check_s_rate_quadratic_bound(double K, double c);
CheckResult check_rate_monotonicity(double K);
CheckResult check_t_rate_quadratic_bound(double K);
CheckResult check_interpolation_identity(int n, Rng& rng);

VerifyReport verify_suite(const std::string& scope);

}  // namespace ahpe
