#include "micky/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "micky/random.hpp"

namespace micky {

GridLayout GridLayout::for_agents(std::size_t n) {
  if (n == 0) throw std::invalid_argument("grid layout: no agents");
  std::size_t rows = 1;
  for (std::size_t r = 1; r * r <= n; ++r) {
    if (n % r == 0) rows = r;
  }
  return {rows, n / rows};
}

namespace {
// [begin, end) of band b when `extent` is split into `bands` near-equal parts.
std::pair<std::size_t, std::size_t> band(std::size_t extent, std::size_t bands, std::size_t b) {
  const std::size_t base = extent / bands;
  const std::size_t extra = extent % bands;
  const std::size_t begin = b * base + std::min(b, extra);
  return {begin, begin + base + (b < extra ? 1 : 0)};
}
}  // namespace

PixelPartition partition_image(std::size_t width, std::size_t height, GridLayout layout,
                               std::size_t overlap) {
  if (layout.rows == 0 || layout.cols == 0 || layout.rows > height || layout.cols > width) {
    throw std::invalid_argument("partition: " + std::to_string(layout.rows) + "x" +
                                std::to_string(layout.cols) + " grid does not fit a " +
                                std::to_string(height) + "x" + std::to_string(width) + " image");
  }
  PixelPartition out{width, height, {}};
  for (std::size_t gr = 0; gr < layout.rows; ++gr) {
    for (std::size_t gc = 0; gc < layout.cols; ++gc) {
      auto [r0, r1] = band(height, layout.rows, gr);
      auto [c0, c1] = band(width, layout.cols, gc);
      r0 = r0 >= overlap ? r0 - overlap : 0;
      c0 = c0 >= overlap ? c0 - overlap : 0;
      r1 = std::min(height, r1 + overlap);
      c1 = std::min(width, c1 + overlap);
      std::vector<Element> tile;
      for (std::size_t r = r0; r < r1; ++r) {
        for (std::size_t c = c0; c < c1; ++c) tile.push_back(r * width + c);
      }
      out.visible.push_back(std::move(tile));
    }
  }
  return out;
}

double pairwise_weight(double ip, double iq, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("pairwise weight: sigma must be positive");
  const double d = ip - iq;
  return std::exp(-(d * d) / (2.0 * sigma * sigma));
}

double ProbabilityModel::foreground_probability(double intensity) const {
  if (!(spread > 0.0)) throw std::invalid_argument("probability model: spread must be positive");
  if (!(floor > 0.0 && floor < 0.5)) throw std::invalid_argument("probability model: floor in (0, 0.5)");
  // N(I; mu_fg, s) / (N(I; mu_fg, s) + N(I; mu_bg, s)) as a logistic of the
  // log-likelihood ratio.
  const double dfg = intensity - foreground_mean;
  const double dbg = intensity - background_mean;
  const double log_ratio = (dbg * dbg - dfg * dfg) / (2.0 * spread * spread);
  const double p = 1.0 / (1.0 + std::exp(-log_ratio));
  return std::clamp(p, floor, 1.0 - floor);
}

UnaryWeights unary_from_probability(double foreground_probability, double lambda, double floor) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("unary weights: lambda must be nonnegative");
  const double p = std::clamp(foreground_probability, floor, 1.0 - floor);
  // 0 * -log(p) stays +0 for the degenerate lambda = 0 case.
  return {lambda == 0.0 ? 0.0 : -lambda * std::log(p),
          lambda == 0.0 ? 0.0 : -lambda * std::log1p(-p)};
}

UnaryWeights unary_weights(double intensity, const ProbabilityModel& model, double lambda) {
  return unary_from_probability(model.foreground_probability(intensity), lambda, model.floor);
}

AgentWeights local_weights(const GrayImage& local_image, std::span<const Element> visible,
                           const SegmentationParams& params) {
  const std::size_t w = local_image.width;
  const std::size_t h = local_image.height;
  const std::size_t n = w * h;
  AgentWeights out;
  out.visible.assign(visible.begin(), visible.end());
  std::sort(out.visible.begin(), out.visible.end());
  out.source.assign(n, 0.0);
  out.sink.assign(n, 0.0);
  std::vector<bool> sees(n, false);
  for (Element p : out.visible) {
    if (p >= n) throw std::out_of_range("visible pixel outside the image");
    sees[p] = true;
    const UnaryWeights u = unary_weights(local_image.pixels[p], params.model, params.lambda);
    out.source[p] = u.source;
    out.sink[p] = u.sink;
  }
  auto link = [&](Element p, std::size_t r, std::size_t c) {
    const Element q = r * w + c;
    if (sees[q]) {
      out.edges.push_back(
          {p, q, pairwise_weight(local_image.pixels[p], local_image.pixels[q], params.sigma)});
    }
  };
  for (Element p : out.visible) {
    const std::size_t r = p / w;
    const std::size_t c = p % w;
    if (c + 1 < w) link(p, r, c + 1);
    if (r + 1 < h) link(p, r + 1, c);
    if (params.connectivity == Connectivity::Eight && r + 1 < h) {
      if (c + 1 < w) link(p, r + 1, c + 1);
      if (c > 0) link(p, r + 1, c - 1);
    }
  }
  return out;
}

CutInstance build_cut_instance(const GrayImage& image, const PixelPartition& partition,
                               const SegmentationParams& params, std::uint64_t noise_seed) {
  if (partition.width != image.width || partition.height != image.height) {
    throw std::invalid_argument("cut instance: partition and image dimensions differ");
  }
  CutInstance inst{image.width, image.height, params, {}};
  for (AgentId i = 0; i < partition.num_agents(); ++i) {
    if (partition.visible[i].empty()) throw std::invalid_argument("cut instance: agent sees no pixels");
    const GrayImage local =
        add_noise(image, params.noise, derive_seed(noise_seed, i, StreamTag::Noise));
    inst.agents.push_back(local_weights(local, partition.visible[i], params));
  }
  return inst;
}

std::shared_ptr<const CutFunction> local_cut_function(const CutInstance& instance, AgentId agent) {
  const AgentWeights& a = instance.agents.at(agent);
  return std::make_shared<const CutFunction>(instance.num_pixels(), a.edges, a.source, a.sink);
}

std::vector<SetFunctionPtr> local_cut_functions(const CutInstance& instance) {
  std::vector<SetFunctionPtr> out;
  for (AgentId i = 0; i < instance.agents.size(); ++i) out.push_back(local_cut_function(instance, i));
  return out;
}

double normalization_constant(const CutInstance& instance) {
  double total = 0.0;
  for (const auto& a : instance.agents) {
    for (double s : a.source) total += s;
  }
  return total;
}

void write_unary_csv(std::ostream& out, const CutInstance& instance, AgentId agent) {
  const AgentWeights& a = instance.agents.at(agent);
  out << "pixel,a_s,a_t\n";
  char buf[96];
  for (Element p : a.visible) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", p + 1, a.source[p], a.sink[p]);
    out << buf;
  }
}

void write_edges_csv(std::ostream& out, const CutInstance& instance, AgentId agent) {
  const AgentWeights& a = instance.agents.at(agent);
  out << "p,q,a_pq\n";
  char buf[96];
  for (const CutEdge& e : a.edges) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g\n", e.p + 1, e.q + 1, e.weight);
    out << buf;
  }
}

}  // namespace micky
