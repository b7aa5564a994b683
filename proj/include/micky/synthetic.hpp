#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "micky/cut_function.hpp"
#include "micky/segmentation.hpp"

namespace micky {

struct SyntheticCutParams {
  std::size_t elements = 8;
  std::size_t agents = 4;
  double edge_probability = 0.4;
  double pair_scale = 1.0;   // pairwise weights ~ U[0, pair_scale]
  double unary_scale = 2.0;  // terminal weights ~ U[0, unary_scale]
};

// Random cut function: each unordered pair is an edge with the given
// probability; every element gets independent source and sink weights.
std::shared_ptr<const CutFunction> random_cut_function(std::size_t n, double edge_probability,
                                                       double pair_scale, double unary_scale,
                                                       std::mt19937_64& rng);

// One private random cut function per agent on a shared ground set.
std::vector<SetFunctionPtr> synthetic_cut_problem(const SyntheticCutParams& params,
                                                  std::uint64_t seed);

// Small random image (at most max_pixels pixels) split among up to max_agents
// tiles, possibly overlapping, with random sigma/lambda/noise.
CutInstance random_segmentation_instance(std::uint64_t seed, std::size_t max_pixels,
                                         std::size_t max_agents = 4);

}  // namespace micky
