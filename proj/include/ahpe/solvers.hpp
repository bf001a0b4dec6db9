#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ahpe/distortion.hpp"
#include "ahpe/iprox.hpp"

namespace ahpe {

enum class Algorithm { euclidean, riemannian, rgd };
// y_anchored: w_{k+1} = y_k, which lies on the geodesic from x_k to z_k.
// strategy_determined: w_{k+1} is whatever the iprox strategy produces.
enum class WRule { y_anchored, strategy_determined };
enum class CheckPolicy { enforce, record, off };

std::string to_string(Algorithm a);
std::string to_string(WRule w);
std::string to_string(CheckPolicy c);
WRule default_w_rule(StrategyKind k);
// True when the strategy always returns w = y.
bool strategy_anchors_at_y(StrategyKind k);

// Row/state k holds A_k, B_k, a_k, xi_k = a_k/A_k, the theta_{k-1} that produced
// them, and delta_k = T_K(d(w_k, z_k)) used by the next step.
struct SolverState {
  int k = 0;
  Point x, z, w, y;
  std::optional<Point> y_prime;
  double A = 1.0;
  double B = 0.5;
  double a = 0.0;
  double theta = 0.0;
  double delta = 1.0;
  double xi = 0.0;
  double lambda = 0.0;
  double sigma = 0.0;
  double potential = NAN;
};

struct TraceRecord {
  int k = 0;
  double f_gap = NAN;
  double potential = NAN;
  double A = 0, B = 0, a = 0, theta = 0, delta = 1, xi = 0;
  double dist_to_opt = NAN;
  double d_wz = 0;
  double iprox_residual = 0;
  double y_yprime_gap = 0;
  double xi_recursion_residual = 0;
};

// Per-step checks that do not fit the CSV schema.
struct StepDiagnostics {
  int k = 0;  // step k-1 -> k
  double potential_increase = 0;    // p_k - p_{k-1}
  double potential_tolerance = 0;   // allowed increase (relative + rounding floor)
  double margin_shortfall = NAN;    // required decrease minus actual, minus tolerance
  double subgradient_gap = 0;
  double addis_bound = NAN;         // 2 d* S_K(d(x,z) + d*)
  double addis_excess = NAN;        // gap minus bound
  double d_star = NAN;
  double distortion_excess = NAN;   // d^2_{w'}(z,x*) - delta d^2_w(z,x*)
  double a_ratio = NAN;             // A_k / A_{k-1}
  double w_to_y = 0;                // d(w_k, y_{k-1})
  bool theory_applies = false;      // potential monotonicity is guaranteed
  bool in_domain = true;
};

struct SolverConfig {
  Algorithm algorithm = Algorithm::riemannian;
  Strategy strategy;
  WRule w_rule = WRule::y_anchored;
  double A0 = 1.0;
  std::optional<double> B0;  // default: (1+mu A0)/2 euclidean, (mu/2) A0 riemannian
  int max_iters = 100;
  double target_gap = 0.0;   // <= 0 disables the early stop
  CheckPolicy checks = CheckPolicy::enforce;
};

struct RunResult {
  std::vector<TraceRecord> trace;
  std::vector<StepDiagnostics> diagnostics;
  std::vector<std::string> warnings;
  SolverState final_state;
  int iterations_to_target = -1;
  double worst_residual = -INFINITY;
  double worst_relative_potential_increase = -INFINITY;
};

double euclid_coeff(double A, double mu, double lambda);
double riemann_theta(double B, double A, double mu, double lambda, double delta);
double xi_recursion_residual(double xi, double xi_next, double delta, double mu,
                             double lambda);
double xi_fixed_point(double mu, double lambda);
double initial_xi(double A0, double B0, double mu, double lambda);

// A_k (f(x_k) - f*) + B_k d_{w_k}^2(z_k, x*); empty when x* is unknown.
std::optional<double> potential_value(const SolverState& s, const Objective& f);
// Floating-point uncertainty of the potential, used as an absolute floor in
// monotonicity checks.
double potential_rounding(const SolverState& s, const Objective& f);

// Distance from w to the geodesic segment [x, z] by golden-section search.
double distance_to_geodesic(const Manifold& m, const Point& w, const Point& x,
                            const Point& z);

struct StepResult {
  SolverState next;
  IproxCertificate cert;
  TraceRecord record;
  StepDiagnostics diag;
};

SolverState initial_state(const Objective& f, const Point& x0, const SolverConfig& cfg);
StepResult euclid_step(const SolverState& s, const Objective& f, const Strategy& st);
StepResult riemann_step(const SolverState& s, const Objective& f, const Strategy& st,
                        WRule w_rule);

TraceRecord initial_record(const SolverState& s, const Objective& f);
RunResult run(const Objective& f, const Point& x0, const SolverConfig& cfg);
// x_{k+1} = exp_{x_k}(-lambda grad f(x_k)); potential column holds f_gap.
RunResult rgd_baseline(const Objective& f, const Point& x0, double lambda, int max_iters,
                       double target_gap);

}  // namespace ahpe
