#include "micky/synthetic.hpp"

#include <stdexcept>

#include "micky/random.hpp"

namespace micky {

std::shared_ptr<const CutFunction> random_cut_function(std::size_t n, double edge_probability,
                                                       double pair_scale, double unary_scale,
                                                       std::mt19937_64& rng) {
  std::vector<CutEdge> edges;
  for (Element p = 0; p < n; ++p) {
    for (Element q = p + 1; q < n; ++q) {
      if (uniform01(rng) < edge_probability) edges.push_back({p, q, pair_scale * uniform01(rng)});
    }
  }
  DenseVector source(n);
  DenseVector sink(n);
  for (Element p = 0; p < n; ++p) {
    source[p] = unary_scale * uniform01(rng);
    sink[p] = unary_scale * uniform01(rng);
  }
  return std::make_shared<const CutFunction>(n, std::move(edges), std::move(source),
                                             std::move(sink));
}

std::vector<SetFunctionPtr> synthetic_cut_problem(const SyntheticCutParams& params,
                                                  std::uint64_t seed) {
  if (params.elements == 0 || params.agents == 0) {
    throw std::invalid_argument("synthetic problem: need elements and agents");
  }
  std::vector<SetFunctionPtr> out;
  for (std::size_t i = 0; i < params.agents; ++i) {
    std::mt19937_64 rng = make_stream(seed, i, StreamTag::Workload);
    out.push_back(random_cut_function(params.elements, params.edge_probability, params.pair_scale,
                                      params.unary_scale, rng));
  }
  return out;
}

CutInstance random_segmentation_instance(std::uint64_t seed, std::size_t max_pixels,
                                         std::size_t max_agents) {
  if (max_pixels == 0 || max_agents == 0) throw std::invalid_argument("random instance: empty bounds");
  std::mt19937_64 rng = make_stream(seed, 0, StreamTag::Workload);
  auto pick = [&](std::size_t lo, std::size_t hi) {  // inclusive
    return lo + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(hi - lo + 1));
  };
  std::size_t width = 0;
  std::size_t height = 0;
  do {
    width = pick(1, max_pixels);
    height = pick(1, max_pixels);
  } while (width * height > max_pixels);

  GrayImage image(width, height);
  for (double& v : image.pixels) v = uniform01(rng);

  GridLayout layout{pick(1, std::min(height, max_agents)), 1};
  layout.cols = pick(1, std::min(width, std::max<std::size_t>(1, max_agents / layout.rows)));
  const std::size_t overlap = pick(0, 1);

  SegmentationParams params;
  params.sigma = 0.05 + 0.5 * uniform01(rng);
  params.lambda = 0.1 + 2.0 * uniform01(rng);
  params.noise = 0.1 * uniform01(rng);
  params.model.spread = 0.1 + 0.2 * uniform01(rng);
  params.connectivity = uniform01(rng) < 0.5 ? Connectivity::Four : Connectivity::Eight;
  return build_cut_instance(image, partition_image(width, height, layout, overlap), params,
                            derive_seed(seed, 1, StreamTag::Noise));
}

}  // namespace micky
