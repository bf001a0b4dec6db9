#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ahpe/errors.hpp"
#include "ahpe/experiment.hpp"
#include "ahpe/verify.hpp"

namespace {

enum Exit { kOk = 0, kValidation = 1, kSolver = 2, kIo = 3 };

int cmd_run(const std::string& path, bool echo) {
  const ahpe::ExperimentConfig cfg = ahpe::load_config(path);
  if (echo) std::cout << ahpe::echo_config(cfg) << "\n";
  const auto out = ahpe::run_experiment(cfg);
  const auto& t = out.result.trace;
  std::printf("trace: %s\n", out.trace_path.c_str());
  std::printf("iterations: %d  final f_gap: %.6e", t.back().k, t.back().f_gap);
  if (std::isfinite(out.result.worst_residual))
    std::printf("  worst iprox residual: %.3e", out.result.worst_residual);
  std::printf("\n");
  if (cfg.run.target_gap > 0) {
    if (out.result.iterations_to_target >= 0)
      std::printf("target gap %.3e reached at k = %d\n", cfg.run.target_gap,
                  out.result.iterations_to_target);
    else
      std::printf("target gap %.3e not reached\n", cfg.run.target_gap);
  }
  for (const auto& w : out.result.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return kOk;
}

int cmd_compare(const std::vector<std::string>& paths, double target) {
  std::vector<ahpe::ExperimentConfig> cfgs;
  for (const auto& p : paths) cfgs.push_back(ahpe::load_config(p));
  const auto rep = ahpe::compare(cfgs, target);
  std::cout << ahpe::format_report(rep);
  std::printf("merged trace: %s\n", rep.merged_csv_path.c_str());
  return kOk;
}

int cmd_verify(const std::string& scope) {
  const auto rep = ahpe::verify_suite(scope);
  std::cout << rep.format();
  const bool ok = rep.passed();
  std::printf("%s: %zu checks\n", ok ? "PASS" : "FAIL", rep.checks.size());
  return ok ? kOk : kSolver;
}

int cmd_presets_list() {
  for (const auto& p : ahpe::list_presets()) std::cout << p << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accelerated hybrid proximal extragradient experiments"};
  app.require_subcommand(1);

  std::string run_path;
  bool echo = false;
  auto* run = app.add_subcommand("run", "Run one experiment config and write its trace");
  run->add_option("config", run_path, "Config file (JSON)")->required();
  run->add_flag("--echo", echo, "Print the config with defaults filled in");

  std::vector<std::string> cmp_paths;
  double target = 1e-6;
  auto* cmp = app.add_subcommand("compare", "Run several configs on one problem and tabulate");
  cmp->add_option("configs", cmp_paths, "Config files")->required();
  cmp->add_option("--target", target, "Gap threshold for iterations-to-target")->capture_default_str();

  std::string scope = "all";
  auto* ver = app.add_subcommand("verify", "Run the property-check suite");
  ver->add_option("scope", scope, "manifold|objectives|distortion|iprox|solver|all")->capture_default_str();

  auto* presets = app.add_subcommand("presets", "Shipped preset configs");
  auto* plist = presets->add_subcommand("list", "List preset config files");
  presets->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    if (*run) return cmd_run(run_path, echo);
    if (*cmp) return cmd_compare(cmp_paths, target);
    if (*ver) return cmd_verify(scope);
    if (*plist) return cmd_presets_list();
  } catch (const ahpe::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  } catch (const ahpe::ContractViolation& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  } catch (const ahpe::CertificateError& e) {
    std::fprintf(stderr, "certificate failure: %s\n", e.what());
    return kSolver;
  } catch (const ahpe::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kSolver;
  } catch (const ahpe::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kIo;
  }
  return kOk;
}
