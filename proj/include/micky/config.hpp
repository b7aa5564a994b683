#pragma once

// Experiment configuration: INI-style sections of key = value pairs. Relative
// paths are resolved against the directory holding the config file. See
// docs/config.md for every key and its default.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "micky/engine.hpp"
#include "micky/image.hpp"
#include "micky/segmentation.hpp"
#include "micky/synthetic.hpp"

namespace micky {

enum class WorkloadKind { SyntheticCut, Segmentation };
enum class WeightScheme { Metropolis, Sinkhorn, File };

struct ExperimentConfig {
  std::filesystem::path base_dir;

  WorkloadKind workload = WorkloadKind::Segmentation;

  // [synthetic]
  SyntheticCutParams synthetic;
  std::uint64_t workload_seed = 1;

  // [segmentation]
  std::optional<std::filesystem::path> image;
  DiskFixture fixture;
  SegmentationParams segmentation;
  std::optional<GridLayout> layout;
  std::size_t overlap = 0;
  std::uint64_t noise_seed = 7;

  // [graph]
  std::size_t agents = 8;
  std::optional<std::filesystem::path> graph_file;
  double edge_probability = 0.3;
  std::uint64_t graph_seed = 1;
  bool symmetrize = true;
  WeightScheme weights = WeightScheme::Metropolis;
  std::optional<std::filesystem::path> weights_file;
  double sinkhorn_tolerance = 1e-12;
  std::size_t sinkhorn_iterations = 100000;

  // [engine]
  std::size_t iterations = 1000;
  double tau = 0.5;
  std::uint64_t seed = 1;
  std::size_t blocks = 40;
  StepsizeConfig stepsize;
  bool update_from_average = true;
  double min_block_probability = 1e-3;
  std::size_t metric_every = 10;
  std::size_t threads = 1;

  // [output]
  std::filesystem::path out_dir = "out";
  std::optional<std::vector<std::size_t>> snapshots;  // default 0,100,...,600,K
  bool oracle = true;
  bool dump_instance = false;

  std::vector<std::size_t> snapshot_rounds() const;
  std::filesystem::path resolve(const std::filesystem::path& p) const;
};

// Throws std::runtime_error naming the offending key on malformed input.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace micky
