#pragma once

// Reference s-t min-cut solver for segmentation instances, independent of the
// set-function machinery.

#include <span>
#include <vector>

#include "micky/segmentation.hpp"

namespace micky {

struct FlowNetwork {
  std::size_t num_pixels = 0;
  DenseVector source_capacity;  // s -> p
  DenseVector sink_capacity;    // p -> t
  std::vector<CutEdge> pairs;   // p <-> q, same capacity both ways; p < q, merged

  // Capacity of the arcs leaving {s} + X.
  double cut_value(const Subset& X) const;
};

// Sums every agent's weights into one network.
FlowNetwork build_flow_network(std::span<const AgentWeights> agents, std::size_t num_pixels);
FlowNetwork build_flow_network(const CutInstance& instance);

struct MinCut {
  Subset source_side;  // pixels reachable from s in the final residual graph
  double cut_value = 0.0;
  double flow_value = 0.0;
  std::size_t augmentations = 0;
};

// Residual capacities below this are treated as saturated.
inline constexpr double kResidualFloor = 1e-12;

// Shortest augmenting paths (BFS, neighbors in ascending node order).
MinCut max_flow_min_cut(const FlowNetwork& net);

}  // namespace micky
