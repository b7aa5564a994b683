#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "micky/experiment.hpp"
#include "micky/oracle.hpp"
#include "micky/synthetic.hpp"

using namespace micky;

namespace {

AgentWeights single_pixel(double source, double sink) {
  AgentWeights a;
  a.visible = {0};
  a.source = {source};
  a.sink = {sink};
  return a;
}

}  // namespace

TEST_CASE("one pixel network") {
  const std::vector<AgentWeights> agents{single_pixel(2.0, 1.0)};
  const FlowNetwork net = build_flow_network(agents, 1);
  CHECK(net.source_capacity == DenseVector{2.0});
  CHECK(net.sink_capacity == DenseVector{1.0});
  CHECK(net.pairs.empty());
  const MinCut cut = max_flow_min_cut(net);
  CHECK(cut.cut_value == 1.0);
  CHECK(cut.flow_value == 1.0);
  CHECK(cut.source_side == Subset::full(1));
}

TEST_CASE("separable network sums per-pixel minima") {
  AgentWeights a;
  a.visible = {0, 1, 2, 3};
  a.source = {1.0, 4.0, 0.5, 2.0};
  a.sink = {3.0, 1.0, 0.5, 7.0};
  const std::vector<AgentWeights> agents{a};
  const MinCut cut = max_flow_min_cut(build_flow_network(agents, 4));
  CHECK(cut.cut_value == doctest::Approx(1.0 + 1.0 + 0.5 + 2.0));
  CHECK(cut.source_side.contains(1));
  CHECK_FALSE(cut.source_side.contains(0));
}

TEST_CASE("disjoint tiles aggregate without double counting") {
  GrayImage img(4, 2);
  for (std::size_t p = 0; p < 8; ++p) img.pixels[p] = 0.1 * static_cast<double>(p);
  SegmentationParams params;
  params.noise = 0.0;
  const CutInstance inst = build_cut_instance(img, partition_image(4, 2, {1, 2}, 0), params, 1);
  const FlowNetwork net = build_flow_network(inst);
  for (Element p = 0; p < 8; ++p) {
    const UnaryWeights w = unary_weights(img.pixels[p], params.model, params.lambda);
    CHECK(net.source_capacity[p] == doctest::Approx(w.source).epsilon(1e-14));
    CHECK(net.sink_capacity[p] == doctest::Approx(w.sink).epsilon(1e-14));
  }
  // Edges crossing the tile border belong to nobody.
  CHECK(net.pairs.size() == 8);
  CHECK_THROWS(build_flow_network(inst.agents, 7));
}

TEST_CASE("network cut values restore the normalization on a 2x2 toy") {
  GrayImage img(2, 2);
  img.pixels = {0.9, 0.7, 0.2, 0.4};
  SegmentationParams params;
  params.noise = 0.02;
  const CutInstance inst = build_cut_instance(img, partition_image(2, 2, {1, 2}, 1), params, 5);
  const FlowNetwork net = build_flow_network(inst);
  const SumFunction total(local_cut_functions(inst));
  const double norm = normalization_constant(inst);
  for (std::uint64_t bits = 0; bits < 16; ++bits) {
    const Subset X = Subset::from_mask(4, bits);
    CHECK(net.cut_value(X) == doctest::Approx(total.eval(X) + norm).epsilon(1e-12));
  }
}

TEST_CASE("max flow agrees with brute force and is deterministic") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const CutInstance inst = random_segmentation_instance(1000 + seed, 12);
    const FlowNetwork net = build_flow_network(inst);
    const MinCut cut = max_flow_min_cut(net);
    CHECK(cut.cut_value == doctest::Approx(cut.flow_value).epsilon(1e-12));
    CHECK(net.cut_value(cut.source_side) == doctest::Approx(cut.cut_value).epsilon(1e-12));
    const Minimizer m = brute_force_min(SumFunction(local_cut_functions(inst)));
    CHECK(std::abs(cut.cut_value - (m.value + normalization_constant(inst))) <= 1e-9);

    const MinCut again = max_flow_min_cut(net);
    CHECK(again.source_side == cut.source_side);
    CHECK(again.cut_value == cut.cut_value);
    CHECK(again.augmentations == cut.augmentations);
  }
}

TEST_CASE("oracle on the disk fixture recovers the disk") {
  ExperimentConfig config;
  config.agents = 8;
  const Experiment e = prepare(config);
  REQUIRE(e.min_cut);
  // The minimizing set collects pixels paying the background penalty, so the
  // object is its complement.
  Subset object = Subset::full(e.ground_size);
  for (Element p : e.min_cut->source_side.members()) object.erase(p);
  CHECK(intersection_over_union(object, disk_mask(config.fixture)) >= 0.95);
}

TEST_CASE("zero lambda leaves only smoothness terms") {
  ExperimentConfig config;
  config.agents = 4;
  config.fixture.size = 8;
  config.blocks = 8;
  config.segmentation.lambda = 0.0;
  const Experiment e = prepare(config);
  REQUIRE(e.min_cut);
  CHECK(e.min_cut->cut_value == 0.0);
  CHECK((e.min_cut->source_side.empty() || e.min_cut->source_side.size() == e.ground_size));
  CHECK(*e.optimal_value == 0.0);
}

TEST_CASE("one pixel image picks the cheaper terminal") {
  GrayImage img(1, 1, 0.7);
  SegmentationParams params;
  params.noise = 0.0;
  const CutInstance inst = build_cut_instance(img, partition_image(1, 1, {1, 1}, 0), params, 1);
  const MinCut cut = max_flow_min_cut(build_flow_network(inst));
  const UnaryWeights w = unary_weights(0.7, params.model, params.lambda);
  CHECK(cut.cut_value == doctest::Approx(std::min(w.source, w.sink)).epsilon(1e-14));
}
