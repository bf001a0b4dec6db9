#pragma once

#include <string>
#include <vector>

#include "ahpe/config.hpp"

namespace ahpe {

struct ExperimentOutcome {
  std::string trace_path;
  RunResult result;
};

// AHPE_OUTPUT_DIR overrides cfg.output.dir when set.
std::string output_dir(const ExperimentConfig& cfg);
RunResult execute(const ExperimentConfig& cfg);
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

struct ComparisonRow {
  std::string name;
  std::string algorithm;
  std::string strategy;
  int iterations_to_target = -1;
  double final_gap = NAN;
  double worst_residual = NAN;
  double worst_potential_increase = NAN;
  double xi_tail_mean = NAN;
  double delta_tail_mean = NAN;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  std::string merged_csv_path;
};

// Runs concurrently; every config must share the manifold and objective.
ComparisonReport compare(const std::vector<ExperimentConfig>& cfgs, double target_gap);
ComparisonRow summarize(const std::string& name, const ExperimentConfig& cfg,
                        const RunResult& r, double target_gap);
std::string format_report(const ComparisonReport& rep);

// AHPE_PRESET_DIR overrides the compiled-in location.
std::string preset_dir();
std::vector<std::string> list_presets();

}  // namespace ahpe
