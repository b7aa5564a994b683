#include "micky/cut_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace micky {

CutFunction::CutFunction(std::size_t ground_size, std::vector<CutEdge> edges,
                         DenseVector source_weights, DenseVector sink_weights)
    : SetFunction(ground_size), source_(std::move(source_weights)), sink_(std::move(sink_weights)) {
  const std::size_t n = ground_size;
  if (source_.size() != n || sink_.size() != n) {
    throw std::invalid_argument("cut function: terminal weight length mismatch");
  }
  auto check_weight = [](double w) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("cut function: weights must be finite and nonnegative");
    }
  };
  for (std::size_t p = 0; p < n; ++p) {
    check_weight(source_[p]);
    check_weight(sink_[p]);
  }

  for (CutEdge& e : edges) {
    if (e.p >= n || e.q >= n) throw std::invalid_argument("cut function: edge endpoint out of range");
    if (e.p == e.q) throw std::invalid_argument("cut function: self loop");
    check_weight(e.weight);
    if (e.p > e.q) std::swap(e.p, e.q);
  }
  std::stable_sort(edges.begin(), edges.end(), [](const CutEdge& a, const CutEdge& b) {
    return a.p != b.p ? a.p < b.p : a.q < b.q;
  });
  for (const CutEdge& e : edges) {
    if (!edges_.empty() && edges_.back().p == e.p && edges_.back().q == e.q) {
      edges_.back().weight += e.weight;
    } else {
      edges_.push_back(e);
    }
  }
  std::erase_if(edges_, [](const CutEdge& e) { return e.weight == 0.0; });

  unary_.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    unary_[p] = sink_[p] - source_[p];
    normalization_ += source_[p];
  }

  std::vector<std::size_t> degree(n, 0);
  for (const CutEdge& e : edges_) {
    ++degree[e.p];
    ++degree[e.q];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t p = 0; p < n; ++p) offsets_[p + 1] = offsets_[p] + degree[p];
  adjacency_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const CutEdge& e : edges_) {
    adjacency_[fill[e.p]++] = {e.q, e.weight};
    adjacency_[fill[e.q]++] = {e.p, e.weight};
  }
  for (std::size_t p = 0; p < n; ++p) {
    std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[p]),
              adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[p + 1]),
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
  }
}

double CutFunction::eval(const Subset& X) const {
  if (X.ground_size() != ground_size()) throw std::invalid_argument("cut function: subset size");
  double pairwise = 0.0;
  for (const CutEdge& e : edges_) {
    if (X.contains(e.p) != X.contains(e.q)) pairwise += e.weight;
  }
  double unary = 0.0;
  for (Element p = 0; p < unary_.size(); ++p) {
    if (X.contains(p)) unary += unary_[p];
  }
  return pairwise + unary;
}

double CutFunction::marginal(Element l, const Subset& S) const {
  check_element(l);
  if (S.contains(l)) throw std::invalid_argument("marginal: element already in the set");
  return marginal_with(l, [&](Element q) { return S.contains(q); });
}

double CutFunction::ranked_marginal(Element l, std::span<const double> y) const {
  check_element(l);
  if (y.size() != ground_size()) throw std::invalid_argument("ranked_marginal: length mismatch");
  return marginal_with(l, [&](Element q) { return ranks_before(y, q, l); });
}

double CutFunction::lovasz(std::span<const double> x) const {
  if (x.size() != ground_size()) throw std::invalid_argument("lovasz: length mismatch");
  double pairwise = 0.0;
  for (const CutEdge& e : edges_) pairwise += e.weight * std::abs(x[e.p] - x[e.q]);
  double unary = 0.0;
  for (Element p = 0; p < unary_.size(); ++p) unary += unary_[p] * x[p];
  return pairwise + unary;
}

}  // namespace micky
