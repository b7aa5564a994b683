#pragma once

// Distributed binary segmentation workload: every agent sees a rectangular
// portion of the image, builds its own s-t weights from its own (noisy) copy
// of the intensities and minimizes its share of the global cut.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "micky/cut_function.hpp"
#include "micky/image.hpp"
#include "micky/topology.hpp"

namespace micky {

struct GridLayout {
  std::size_t rows = 1;
  std::size_t cols = 1;

  std::size_t agents() const { return rows * cols; }
  // rows = largest divisor of n not above sqrt(n); 8 -> 2 x 4.
  static GridLayout for_agents(std::size_t n);
};

struct PixelPartition {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::vector<Element>> visible;  // ascending pixel ids per agent

  std::size_t num_agents() const { return visible.size(); }
};

// Tiles in row-major agent order, each grown by `overlap` pixels across
// interior borders.
PixelPartition partition_image(std::size_t width, std::size_t height, GridLayout layout,
                               std::size_t overlap = 0);

// exp(-(Ip - Iq)^2 / (2 sigma^2))
double pairwise_weight(double ip, double iq, double sigma);

// Two-Gaussian likelihood ratio for "pixel is foreground", clamped to
// [floor, 1 - floor].
struct ProbabilityModel {
  double foreground_mean = 0.8;
  double background_mean = 0.2;
  double spread = 0.15;
  double floor = 1e-6;

  double foreground_probability(double intensity) const;
};

struct UnaryWeights {
  double source = 0.0;  // a_sp = -lambda log P(x_p = 1)
  double sink = 0.0;    // a_pt = -lambda log P(x_p = 0)
};

UnaryWeights unary_from_probability(double foreground_probability, double lambda, double floor);
UnaryWeights unary_weights(double intensity, const ProbabilityModel& model, double lambda);

enum class Connectivity { Four, Eight };

struct SegmentationParams {
  double sigma = 0.1;
  double lambda = 1.0;
  ProbabilityModel model;
  Connectivity connectivity = Connectivity::Four;
  double noise = 0.05;
};

struct AgentWeights {
  std::vector<Element> visible;
  std::vector<CutEdge> edges;  // lattice pairs with both ends visible
  DenseVector source;          // zero outside the visible set
  DenseVector sink;
};

struct CutInstance {
  std::size_t width = 0;
  std::size_t height = 0;
  SegmentationParams params;
  std::vector<AgentWeights> agents;

  std::size_t num_pixels() const { return width * height; }
};

// Weights one agent derives from its own intensities on its visible pixels.
AgentWeights local_weights(const GrayImage& local_image, std::span<const Element> visible,
                           const SegmentationParams& params);

// Each agent perturbs the image with its own noise stream before building
// weights.
CutInstance build_cut_instance(const GrayImage& image, const PixelPartition& partition,
                               const SegmentationParams& params, std::uint64_t noise_seed);

std::shared_ptr<const CutFunction> local_cut_function(const CutInstance& instance, AgentId agent);
std::vector<SetFunctionPtr> local_cut_functions(const CutInstance& instance);

// sum_i sum_q a^i_sq: raw cut capacity minus the sum of the private functions.
double normalization_constant(const CutInstance& instance);

// Debug dumps: `pixel,a_s,a_t` for visible pixels and `p,q,a_pq` (1-based).
void write_unary_csv(std::ostream& out, const CutInstance& instance, AgentId agent);
void write_edges_csv(std::ostream& out, const CutInstance& instance, AgentId agent);

}  // namespace micky
