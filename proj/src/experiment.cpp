#include "ahpe/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <future>

#include "ahpe/errors.hpp"
#include "ahpe/trace.hpp"

#ifndef AHPE_PRESET_DIR_DEFAULT
#define AHPE_PRESET_DIR_DEFAULT "presets"
#endif

namespace fs = std::filesystem;

namespace ahpe {

namespace {

std::string section_key(const ExperimentConfig& c) {
  const auto& m = c.manifold;
  const auto& o = c.objective;
  return m.kind + "|" + std::to_string(m.dim) + "|" + format_double(m.curvature) + "|" +
         o.kind + "|" + format_double(o.radius) + "|" + std::to_string(o.anchors) + "|" +
         std::to_string(o.seed) + "|" + format_double(o.condition) + "|" +
         format_double(o.mu);
}

double tail_mean(const std::vector<TraceRecord>& t, double TraceRecord::*field) {
  if (t.size() < 2) return NAN;
  const size_t n = std::max<size_t>(1, (t.size() - 1) / 5);
  double s = 0;
  for (size_t i = t.size() - n; i < t.size(); ++i) s += t[i].*field;
  return s / n;
}

}  // namespace

std::string output_dir(const ExperimentConfig& cfg) {
  if (const char* env = std::getenv("AHPE_OUTPUT_DIR"); env && *env) return env;
  return cfg.output.dir;
}

RunResult execute(const ExperimentConfig& cfg) {
  const ObjectivePtr f = build_objective(cfg);
  const SolverConfig sc = build_solver_config(cfg, *f);
  return run(*f, initial_point(cfg, *f), sc);
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  ExperimentOutcome out;
  out.result = execute(cfg);
  const fs::path dir = output_dir(cfg);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");
  out.trace_path = (dir / (cfg.output.name + ".csv")).string();
  write_text_file(out.trace_path, trace_csv(out.result.trace));
  write_text_file((dir / (cfg.output.name + ".config.json")).string(), echo_config(cfg) + "\n");
  return out;
}

ComparisonRow summarize(const std::string& name, const ExperimentConfig& cfg,
                        const RunResult& r, double target_gap) {
  ComparisonRow row;
  row.name = name;
  row.algorithm = cfg.method.algorithm;
  row.strategy = cfg.method.algorithm == "rgd" ? "-" : cfg.method.strategy;
  for (const auto& rec : r.trace)
    if (std::isfinite(rec.f_gap) && rec.f_gap <= target_gap) {
      row.iterations_to_target = rec.k;
      break;
    }
  if (!r.trace.empty()) row.final_gap = r.trace.back().f_gap;
  row.worst_residual = r.worst_residual;
  row.worst_potential_increase = r.worst_relative_potential_increase;
  if (cfg.method.algorithm != "rgd") {
    row.xi_tail_mean = tail_mean(r.trace, &TraceRecord::xi);
    row.delta_tail_mean = tail_mean(r.trace, &TraceRecord::delta);
  }
  return row;
}

ComparisonReport compare(const std::vector<ExperimentConfig>& cfgs, double target_gap) {
  if (cfgs.empty()) throw ValidationError("compare needs at least one config");
  const std::string key = section_key(cfgs.front());
  for (const auto& c : cfgs)
    if (section_key(c) != key)
      throw ValidationError("compare: configs must share the manifold and objective sections");

  std::vector<std::future<RunResult>> jobs;
  for (const auto& c : cfgs)
    jobs.push_back(std::async(std::launch::async, [c, target_gap] {
      ExperimentConfig local = c;
      if (target_gap > 0) local.run.target_gap = target_gap;
      return execute(local);
    }));
  std::vector<RunResult> results;
  for (auto& j : jobs) results.push_back(j.get());

  ComparisonReport rep;
  std::string merged = std::string(kTraceVersionLine) + "\nrun," + kTraceHeader + "\n";
  for (size_t i = 0; i < cfgs.size(); ++i) {
    const std::string name = cfgs[i].output.name + "#" + std::to_string(i);
    rep.rows.push_back(summarize(name, cfgs[i], results[i], target_gap));
    for (const auto& r : results[i].trace) merged += name + "," + trace_row(r) + "\n";
  }
  const fs::path dir = output_dir(cfgs.front());
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");
  rep.merged_csv_path = (dir / "compare.csv").string();
  write_text_file(rep.merged_csv_path, merged);
  return rep;
}

std::string format_report(const ComparisonReport& rep) {
  auto num = [](double v, const char* f) {
    if (!std::isfinite(v)) return std::string("-");
    char b[32];
    std::snprintf(b, sizeof b, f, v);
    return std::string(b);
  };
  int w = 3;
  for (const auto& r : rep.rows) w = std::max<int>(w, r.name.size());
  std::string s;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-*s  %-11s %-16s %8s %12s %12s %12s %10s %10s\n", w, "run",
                "algorithm", "strategy", "iters", "final_gap", "max_resid", "max_dp/p",
                "xi_tail", "delta_tail");
  s += buf;
  for (const auto& r : rep.rows) {
    std::snprintf(buf, sizeof buf, "%-*s  %-11s %-16s %8s %12s %12s %12s %10s %10s\n", w,
                  r.name.c_str(), r.algorithm.c_str(), r.strategy.c_str(),
                  r.iterations_to_target >= 0 ? std::to_string(r.iterations_to_target).c_str()
                                              : "-",
                  num(r.final_gap, "%.4e").c_str(), num(r.worst_residual, "%.4e").c_str(),
                  num(r.worst_potential_increase, "%.4e").c_str(),
                  num(r.xi_tail_mean, "%.6f").c_str(), num(r.delta_tail_mean, "%.6f").c_str());
    s += buf;
  }
  return s;
}

std::string preset_dir() {
  if (const char* env = std::getenv("AHPE_PRESET_DIR"); env && *env) return env;
  return AHPE_PRESET_DIR_DEFAULT;
}

std::vector<std::string> list_presets() {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(preset_dir(), ec))
    if (e.path().extension() == ".json") out.push_back(e.path().string());
  if (ec) throw IoError("cannot read preset directory '" + preset_dir() + "'");
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ahpe
