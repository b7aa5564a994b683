#pragma once

// End-to-end experiment pipeline: topology, workload, oracle, run and
// artifact emission. Shared by the command-line tool and the acceptance suite.

#include <filesystem>
#include <iosfwd>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "micky/config.hpp"
#include "micky/engine.hpp"
#include "micky/oracle.hpp"

namespace micky {

struct Experiment {
  ExperimentConfig config;
  Digraph graph;
  WeightMatrix weights;
  std::vector<SetFunctionPtr> functions;
  BlockPartition partition;
  std::size_t ground_size = 0;

  // Segmentation only.
  std::optional<GrayImage> image;
  std::optional<CutInstance> instance;
  std::optional<GridLayout> layout;

  // Minimum of the summed private functions, and a minimizer, when the oracle
  // is enabled.
  std::optional<double> optimal_value;
  std::optional<Subset> optimal_set;
  std::optional<MinCut> min_cut;
};

Digraph build_graph(const ExperimentConfig& config);
WeightMatrix build_weights(const ExperimentConfig& config, const Digraph& graph);

// Loads or generates everything a run needs. Throws with a diagnostic naming
// the offending file or parameter.
Experiment prepare(const ExperimentConfig& config);

RunConfig make_run_config(const Experiment& experiment);

// Writes trace.csv, cost_error.csv, summary.txt and the masks/snapshots (PGM
// for segmentation, solution.csv for synthetic workloads).
void write_run_outputs(const Experiment& experiment, const RunTrace& trace,
                       const std::filesystem::path& out_dir);

void write_summary(std::ostream& out, const Experiment& experiment, const RunTrace& trace);

// Min-cut value and mask of the aggregated segmentation instance.
void write_oracle_outputs(const Experiment& experiment, const std::filesystem::path& out_dir);

struct ValidationCheck {
  std::string name;
  bool passed = true;
  std::vector<std::string> messages;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  std::vector<std::string> warnings;

  bool ok() const;
};

// Configuration sanity, strong connectivity, double stochasticity, stepsize
// conditions and the block-probability floor. Never throws on bad input;
// every problem becomes a failed check.
ValidationReport validate(const ExperimentConfig& config);
void print_report(std::ostream& out, const ValidationReport& report);

// Fraction of positions where both masks agree.
double mask_agreement(const Subset& a, const Subset& b);
double intersection_over_union(const Subset& a, const Subset& b);

}  // namespace micky
