#include "ahpe/config.hpp"

#include <cmath>
#include <filesystem>
#include <set>
#include <vector>

#include "ahpe/errors.hpp"
#include "ahpe/trace.hpp"
#include "json.hpp"

namespace ahpe {

using nlohmann::json;

namespace {

class Section {
 public:
  Section(const json& j, std::string path, std::set<std::string> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    for (const auto& [k, v] : j_.items())
      if (!allowed.count(k)) throw ConfigError(field(k) + ": unknown key");
  }

  std::string field(const std::string& k) const { return path_ + "." + k; }
  bool has(const std::string& k) const { return j_.contains(k) && !j_.at(k).is_null(); }

  std::string str(const std::string& k, const std::string& def) const {
    if (!has(k)) return def;
    if (!j_.at(k).is_string()) throw ConfigError(field(k) + ": expected a string");
    return j_.at(k).get<std::string>();
  }
  double num(const std::string& k, double def) const {
    return opt_num(k).value_or(def);
  }
  std::optional<double> opt_num(const std::string& k) const {
    if (!has(k)) return std::nullopt;
    if (!j_.at(k).is_number()) throw ConfigError(field(k) + ": expected a number");
    return j_.at(k).get<double>();
  }
  long long integer(const std::string& k, long long def) const {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_number_integer() && !v.is_number_unsigned())
      throw ConfigError(field(k) + ": expected an integer");
    return v.get<long long>();
  }

 private:
  const json& j_;
  std::string path_;
};

json parse_strict(const std::string& text) {
  struct Frame {
    std::set<std::string> keys;
    std::string last;
  };
  std::vector<Frame> stack;
  std::string duplicate;
  json::parser_callback_t cb = [&](int, json::parse_event_t ev, json& parsed) {
    switch (ev) {
      case json::parse_event_t::object_start: stack.emplace_back(); break;
      case json::parse_event_t::object_end: stack.pop_back(); break;
      case json::parse_event_t::key: {
        const auto k = parsed.get<std::string>();
        if (!stack.back().keys.insert(k).second && duplicate.empty()) {
          std::string path;
          for (size_t i = 0; i + 1 < stack.size(); ++i) path += stack[i].last + ".";
          duplicate = path + k;
        }
        stack.back().last = k;
        break;
      }
      default: break;
    }
    return true;
  };
  json j;
  try {
    j = json::parse(text, cb);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  if (!duplicate.empty()) throw ConfigError("parse error: duplicate key '" + duplicate + "'");
  return j;
}

bool one_of(const std::string& v, std::initializer_list<const char*> opts) {
  for (const char* o : opts)
    if (v == o) return true;
  return false;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& default_name) {
  const json j = parse_strict(text);
  Section top(j, "config", {"manifold", "objective", "method", "run", "output"});
  for (const char* req : {"manifold", "objective", "method"})
    if (!top.has(req)) throw ConfigError(std::string("config.") + req + ": missing section");

  ExperimentConfig c;
  {
    Section s(j.at("manifold"), "manifold", {"kind", "dim", "curvature"});
    c.manifold.kind = s.str("kind", c.manifold.kind);
    c.manifold.dim = static_cast<int>(s.integer("dim", c.manifold.dim));
    c.manifold.curvature = s.num("curvature", c.manifold.kind == "euclidean" ? 0.0 : 1.0);
  }
  {
    Section s(j.at("objective"), "objective",
              {"kind", "radius", "anchors", "seed", "condition", "mu"});
    auto& o = c.objective;
    o.kind = s.str("kind", o.kind);
    o.radius = s.num("radius", o.radius);
    o.anchors = static_cast<int>(s.integer("anchors", o.anchors));
    const long long seed = s.integer("seed", 1);
    if (seed < 0) throw ConfigError("objective.seed: must be nonnegative");
    o.seed = static_cast<unsigned long long>(seed);
    o.condition = s.num("condition", o.condition);
    o.mu = s.num("mu", o.mu);
  }
  {
    Section s(j.at("method"), "method",
              {"algorithm", "strategy", "lambda_rule", "lambda", "sigma", "A0", "B0",
               "w_rule", "offset_fraction"});
    auto& m = c.method;
    m.algorithm = s.str("algorithm", m.algorithm);
    m.strategy = s.str("strategy", m.strategy);
    m.lambda = s.opt_num("lambda");
    m.lambda_rule = s.str("lambda_rule", m.lambda ? "fixed" : "max_valid");
    m.sigma = s.num("sigma", m.sigma);
    m.A0 = s.num("A0", m.A0);
    m.B0 = s.opt_num("B0");
    m.w_rule = s.str("w_rule", m.w_rule);
    m.offset_fraction = s.num("offset_fraction", m.offset_fraction);
  }
  if (top.has("run")) {
    Section s(j.at("run"), "run", {"max_iters", "target_gap", "seed", "init_distance", "checks"});
    auto& r = c.run;
    r.max_iters = static_cast<int>(s.integer("max_iters", r.max_iters));
    r.target_gap = s.num("target_gap", r.target_gap);
    const long long seed = s.integer("seed", 1);
    if (seed < 0) throw ConfigError("run.seed: must be nonnegative");
    r.seed = static_cast<unsigned long long>(seed);
    r.init_distance = s.opt_num("init_distance");
    r.checks = s.str("checks", r.checks);
  }
  c.output.name = default_name;
  if (top.has("output")) {
    Section s(j.at("output"), "output", {"dir", "name"});
    c.output.dir = s.str("dir", c.output.dir);
    c.output.name = s.str("name", c.output.name);
  }
  if (c.output.name.empty()) c.output.name = "trace";
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  const std::string text = read_text_file(path);
  return parse_config(text, std::filesystem::path(path).stem().string());
}

std::string echo_config(const ExperimentConfig& c) {
  json j;
  j["manifold"] = {{"kind", c.manifold.kind},
                   {"dim", c.manifold.dim},
                   {"curvature", c.manifold.curvature}};
  j["objective"] = {{"kind", c.objective.kind},       {"radius", c.objective.radius},
                    {"anchors", c.objective.anchors}, {"seed", c.objective.seed},
                    {"condition", c.objective.condition}, {"mu", c.objective.mu}};
  j["method"] = {{"algorithm", c.method.algorithm},
                 {"strategy", c.method.strategy},
                 {"lambda_rule", c.method.lambda_rule},
                 {"lambda", opt_json(c.method.lambda)},
                 {"sigma", c.method.sigma},
                 {"A0", c.method.A0},
                 {"B0", opt_json(c.method.B0)},
                 {"w_rule", c.method.w_rule},
                 {"offset_fraction", c.method.offset_fraction}};
  j["run"] = {{"max_iters", c.run.max_iters},
              {"target_gap", c.run.target_gap},
              {"seed", c.run.seed},
              {"init_distance", opt_json(c.run.init_distance)},
              {"checks", c.run.checks}};
  j["output"] = {{"dir", c.output.dir}, {"name", c.output.name}};
  return j.dump(2);
}

Manifold build_manifold(const ManifoldSpec& s) {
  if (s.kind == "euclidean") return Manifold::euclidean(s.dim);
  return Manifold::hyperbolic(s.dim, s.curvature);
}

ObjectivePtr build_objective(const ExperimentConfig& cfg) {
  const Manifold m = build_manifold(cfg.manifold);
  const auto& o = cfg.objective;
  Rng rng(o.seed);
  if (o.kind == "squared_distance") return make_squared_distance(m, m.origin(), o.radius);
  if (o.kind == "karcher") {
    std::vector<Point> anchors;
    for (int i = 0; i < o.anchors; ++i) anchors.push_back(m.random_point(rng, o.radius));
    std::vector<double> w(o.anchors, 1.0 / o.anchors);
    return make_karcher(m, anchors, w, o.radius);
  }
  return make_conditioned_quadratic(m, m.origin(), o.mu, o.condition, o.radius, rng);
}

double resolve_lambda(const ExperimentConfig& cfg, const Objective& f) {
  const auto& m = cfg.method;
  if (m.lambda_rule == "fixed") return *m.lambda;
  if (m.lambda_rule == "inverse_L" || m.algorithm == "rgd") return 1.0 / f.L();
  const auto kind = strategy_from_string(m.strategy);
  const double lim = max_valid_lambda(kind, f.L(), f.mu(), m.sigma);
  return std::isfinite(lim) ? lim : 1.0 / f.L();
}

SolverConfig build_solver_config(const ExperimentConfig& cfg, const Objective& f) {
  SolverConfig s;
  const auto& m = cfg.method;
  s.algorithm = m.algorithm == "euclidean"  ? Algorithm::euclidean
                : m.algorithm == "rgd"      ? Algorithm::rgd
                                            : Algorithm::riemannian;
  s.strategy.kind = strategy_from_string(m.strategy);
  s.strategy.lambda = resolve_lambda(cfg, f);
  s.strategy.sigma = m.sigma;
  if (s.strategy.kind == StrategyKind::gen_raxgd && m.offset_fraction > 0)
    s.strategy.offset = random_offset_rule(m.offset_fraction, cfg.run.seed + 1);
  s.w_rule = m.w_rule == "default"     ? default_w_rule(s.strategy.kind)
             : m.w_rule == "y_anchored" ? WRule::y_anchored
                                        : WRule::strategy_determined;
  s.A0 = m.A0;
  s.B0 = m.B0;
  s.max_iters = cfg.run.max_iters;
  s.target_gap = cfg.run.target_gap;
  s.checks = cfg.run.checks == "record" ? CheckPolicy::record
             : cfg.run.checks == "off"  ? CheckPolicy::off
                                        : CheckPolicy::enforce;
  return s;
}

Point initial_point(const ExperimentConfig& cfg, const Objective& f) {
  const Manifold& m = f.manifold();
  const Point& xs = *f.optimum();
  double r = cfg.run.init_distance.value_or(
      std::isfinite(f.domain_radius()) ? std::min(1.0, 0.25 * f.domain_radius()) : 1.0);
  Rng rng(cfg.run.seed);
  for (int tries = 0; tries < 1000; ++tries) {
    const Point x0 = m.exp_map(xs, m.random_tangent(rng, xs, r));
    if (f.in_domain(x0)) return x0;
  }
  throw ValidationError("run.init_distance: no starting point at this distance lies in the domain");
}

void validate_config(const ExperimentConfig& c) {
  auto fail = [](const std::string& field, const std::string& msg) {
    throw ValidationError(field + ": " + msg);
  };
  if (!one_of(c.manifold.kind, {"euclidean", "hyperbolic"}))
    fail("manifold.kind", "must be euclidean or hyperbolic");
  if (c.manifold.dim < 1) fail("manifold.dim", "must be positive");
  if (c.manifold.kind == "hyperbolic" && !(c.manifold.curvature > 0))
    fail("manifold.curvature", "must be positive for hyperbolic space");

  const auto& o = c.objective;
  if (!one_of(o.kind, {"squared_distance", "karcher", "quadratic"}))
    fail("objective.kind", "must be squared_distance, karcher or quadratic");
  if (!(o.radius > 0)) fail("objective.radius", "must be positive");
  if (o.kind == "karcher" && o.anchors < 1) fail("objective.anchors", "must be at least 1");
  if (o.kind == "quadratic") {
    if (!(o.mu > 0)) fail("objective.mu", "must be positive");
    if (!(o.condition >= 1)) fail("objective.condition", "must be at least 1");
  }

  const auto& m = c.method;
  if (!one_of(m.algorithm, {"euclidean", "riemannian", "rgd"}))
    fail("method.algorithm", "must be euclidean, riemannian or rgd");
  if (m.algorithm == "euclidean" && c.manifold.kind != "euclidean")
    fail("method.algorithm", "the euclidean algorithm needs a euclidean manifold");
  if (!one_of(m.strategy,
              {"exact_quadratic", "nesterov_grad", "two_step_grad", "raxgd", "gen_raxgd"}))
    fail("method.strategy", "unknown strategy '" + m.strategy + "'");
  if (m.strategy == "exact_quadratic" &&
      (c.manifold.kind != "euclidean" || o.kind != "quadratic"))
    fail("method.strategy", "exact_quadratic requires a euclidean quadratic objective");
  if (!one_of(m.lambda_rule, {"max_valid", "inverse_L", "fixed"}))
    fail("method.lambda_rule", "must be max_valid, inverse_L or fixed");
  if (m.lambda_rule == "fixed" && !m.lambda) fail("method.lambda", "required when lambda_rule is fixed");
  if (m.lambda && !(*m.lambda > 0)) fail("method.lambda", "must be positive");
  if (!(m.sigma > 0 && m.sigma < 1)) fail("method.sigma", "must lie in (0,1)");
  if (!(m.A0 >= 0)) fail("method.A0", "must be nonnegative");
  if (m.B0 && !(*m.B0 > 0)) fail("method.B0", "must be positive");
  if (m.w_rule == "midpoint")
    fail("method.w_rule",
         "midpoint is not supported: no shipped strategy can certify w at the x-z midpoint");
  if (!one_of(m.w_rule, {"default", "y_anchored", "strategy_determined"}))
    fail("method.w_rule", "must be default, y_anchored or strategy_determined");
  if (m.w_rule == "y_anchored" && c.manifold.kind != "euclidean" &&
      !strategy_anchors_at_y(strategy_from_string(m.strategy)))
    fail("method.w_rule", "y_anchored needs nesterov_grad or two_step_grad");
  if (!(m.offset_fraction >= 0 && m.offset_fraction < 1))
    fail("method.offset_fraction", "must lie in [0,1)");
  if (m.offset_fraction > 0 && m.strategy != "gen_raxgd")
    fail("method.offset_fraction", "only used by gen_raxgd");

  const auto& r = c.run;
  if (r.max_iters < 0) fail("run.max_iters", "must be nonnegative");
  if (!(r.target_gap >= 0)) fail("run.target_gap", "must be nonnegative");
  if (r.init_distance && !(*r.init_distance >= 0)) fail("run.init_distance", "must be nonnegative");
  if (!one_of(r.checks, {"enforce", "record", "off"}))
    fail("run.checks", "must be enforce, record or off");

  const ObjectivePtr f = build_objective(c);
  const SolverConfig sc = build_solver_config(c, *f);
  if (sc.algorithm == Algorithm::rgd) {
    if (sc.strategy.lambda > (1.0 + 1e-12) / f->L())
      fail("method.lambda", "gradient descent requires lambda <= 1/L");
    return;
  }
  try {
    check_strategy(*f, sc.strategy);
  } catch (const ValidationError& e) {
    fail("method.lambda", e.what());
  }
}

}  // namespace ahpe
