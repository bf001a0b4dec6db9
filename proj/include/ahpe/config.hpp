#pragma once

#include <optional>
#include <string>

#include "ahpe/solvers.hpp"

namespace ahpe {

struct ManifoldSpec {
  std::string kind = "hyperbolic";  // euclidean | hyperbolic
  int dim = 2;
  double curvature = 1.0;           // ignored for euclidean
};

struct ObjectiveSpec {
  std::string kind = "karcher";  // squared_distance | karcher | quadratic
  double radius = 1.0;           // D
  int anchors = 10;              // karcher only
  unsigned long long seed = 1;
  double condition = 100.0;      // quadratic only: L/mu
  double mu = 1.0;               // quadratic only
};

struct MethodSpec {
  std::string algorithm = "riemannian";  // euclidean | riemannian | rgd
  std::string strategy = "nesterov_grad";
  std::string lambda_rule = "max_valid";  // max_valid | inverse_L | fixed
  std::optional<double> lambda;
  double sigma = 0.5;
  double A0 = 1.0;
  std::optional<double> B0;
  std::string w_rule = "default";  // default | y_anchored | strategy_determined
  double offset_fraction = 0.0;    // gen_raxgd only
};

struct RunSpec {
  int max_iters = 200;
  double target_gap = 0.0;
  unsigned long long seed = 1;
  std::optional<double> init_distance;  // default: a quarter of the domain radius, capped at 1
  std::string checks = "enforce";       // enforce | record | off
};

struct OutputSpec {
  std::string dir = "ahpe_out";
  std::string name;  // default: config file stem
};

struct ExperimentConfig {
  ManifoldSpec manifold;
  ObjectiveSpec objective;
  MethodSpec method;
  RunSpec run;
  OutputSpec output;
};

// Throws ConfigError (parse/schema) or ValidationError (method validity).
ExperimentConfig parse_config(const std::string& text, const std::string& default_name);
ExperimentConfig load_config(const std::string& path);
// Fully populated config, defaults included.
std::string echo_config(const ExperimentConfig& cfg);

Manifold build_manifold(const ManifoldSpec& s);
ObjectivePtr build_objective(const ExperimentConfig& cfg);
double resolve_lambda(const ExperimentConfig& cfg, const Objective& f);
SolverConfig build_solver_config(const ExperimentConfig& cfg, const Objective& f);
Point initial_point(const ExperimentConfig& cfg, const Objective& f);
// Checks all parameter conditions; throws ValidationError with a field path.
void validate_config(const ExperimentConfig& cfg);

}  // namespace ahpe
