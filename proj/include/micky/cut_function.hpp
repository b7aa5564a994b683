#pragma once

#include <span>
#include <vector>

#include "micky/submodular.hpp"

namespace micky {

// Undirected pairwise term between two ground-set elements.
struct CutEdge {
  Element p;
  Element q;
  double weight;
};

// Normalized s-t cut function on a weighted undirected graph with terminal
// arcs s->p (source_weights) and p->t (sink_weights):
//
//   F(X) = sum_{p in X, q notin X} a_pq + sum_{q notin X} a_sq + sum_{p in X} a_pt - sum_q a_sq
//        = sum_{edges cut by X} a_pq + sum_{p in X} (a_pt - a_sp)
//
// Evaluation uses the second form. Its Lovász extension is
//   f(x) = sum_edges a_pq |x_p - x_q| + sum_p (a_pt - a_sp) x_p,
// summed in the same order so f(1_X) == F(X) bit for bit.
class CutFunction final : public SetFunction {
 public:
  // Edges are canonicalized (p < q), parallel edges merged, zero weights
  // dropped. Throws on self loops, negative or non-finite weights.
  CutFunction(std::size_t ground_size, std::vector<CutEdge> edges, DenseVector source_weights,
              DenseVector sink_weights);

  double eval(const Subset& X) const override;
  double marginal(Element l, const Subset& S) const override;
  double ranked_marginal(Element l, std::span<const double> y) const override;
  double lovasz(std::span<const double> x) const override;

  const std::vector<CutEdge>& edges() const { return edges_; }
  const DenseVector& source_weights() const { return source_; }
  const DenseVector& sink_weights() const { return sink_; }
  // sum_q a_sq: the constant that separates F from the raw cut capacity.
  double normalization() const { return normalization_; }
  // Raw s-t cut capacity of X, i.e. F(X) + normalization().
  double cut_capacity(const Subset& X) const { return eval(X) + normalization_; }

 private:
  struct Neighbor {
    Element node;
    double weight;
  };

  template <class InSet>
  double marginal_with(Element l, InSet in_set) const {
    double total = 0.0;
    for (std::size_t k = offsets_[l]; k < offsets_[l + 1]; ++k) {
      const Neighbor& nb = adjacency_[k];
      total += in_set(nb.node) ? -nb.weight : nb.weight;
    }
    return total + unary_[l];
  }

  std::vector<CutEdge> edges_;
  DenseVector source_;
  DenseVector sink_;
  DenseVector unary_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  double normalization_ = 0.0;
};

}  // namespace micky
