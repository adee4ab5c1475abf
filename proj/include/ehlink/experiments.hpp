#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ehlink/analysis.hpp"
#include "ehlink/sim.hpp"

namespace ehlink::experiments {

/// fig2 .. fig7 or custom.
struct ExperimentSpec {
  std::string name = "custom";
  sim::SimConfig base;
  std::string out_dir = ".";
  std::optional<int> replications;
  std::optional<long> frames;
  std::optional<double> rho;  // restricts the grid to one value
};

bool is_named_experiment(const std::string& name);
const std::vector<std::string>& experiment_names();

/// Config of a named experiment built on top of `base`.
sim::SimConfig experiment_config(const std::string& name, const sim::SimConfig& base);

struct AnalyticRow {
  double rho = 0;
  double p_out_mw = 0;
  int beta = 4;
  int K = 4;
  double bound_pdp = 0;
  double chain_pdp = 0;
};

/// Chain config of the fixed equal-power link described by a simulator config.
analysis::ChainConfig chain_config(const sim::PreparedModel& model);

/// Bound-mode and chain-mode PDP of an equal-power config.
AnalyticRow analyze(const sim::SimConfig& cfg);

struct ExperimentResult {
  std::vector<sim::SampleSet> sets;
  std::vector<AnalyticRow> analytic;
  std::vector<std::string> files;
};

/// Runs the sweep(s) of the experiment and writes <name>.csv, <name>.gp and,
/// for fig6, analytical.csv into out_dir.
ExperimentResult run_experiment(const ExperimentSpec& spec);

void write_analytic_csv(std::ostream& out, const std::vector<AnalyticRow>& rows);

}  // namespace ehlink::experiments
