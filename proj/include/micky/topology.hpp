#pragma once

// Communication graphs and consensus weights.
//
// An edge (j, i) means agent j sends to agent i. Self loops are implicit: every
// agent belongs to its own in- and out-neighborhood and is never stored as an
// edge.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace micky {

using AgentId = std::size_t;

class Digraph {
 public:
  Digraph() = default;
  // Throws on out-of-range endpoints or self loops; duplicates are merged.
  Digraph(std::size_t num_nodes, std::vector<std::pair<AgentId, AgentId>> edges);

  std::size_t size() const { return n_; }
  // Sorted by (sender, receiver).
  const std::vector<std::pair<AgentId, AgentId>>& edges() const { return edges_; }
  bool has_edge(AgentId from, AgentId to) const;

  // Strict neighbors (self excluded), ascending.
  const std::vector<AgentId>& in_neighbors(AgentId i) const { return in_.at(i); }
  const std::vector<AgentId>& out_neighbors(AgentId i) const { return out_.at(i); }

  bool is_symmetric() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::pair<AgentId, AgentId>> edges_;
  std::vector<std::vector<AgentId>> in_;
  std::vector<std::vector<AgentId>> out_;
};

// Row-major N x N matrix; at(i, j) is the weight agent i applies to the
// estimate received from j.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  explicit WeightMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& at(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  double min_positive() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

inline constexpr double kStochasticTolerance = 1e-9;

struct ErdosRenyiOptions {
  std::size_t max_attempts = 1000;
};

// I.i.d. directed edges with probability p, resampled until strongly connected.
Digraph erdos_renyi_strongly_connected(std::size_t n, double p, std::uint64_t seed,
                                       ErdosRenyiOptions options = {});

bool is_strongly_connected(const Digraph& g);

// Adds the reverse of every edge.
Digraph symmetrize(const Digraph& g);

// Requires a symmetric edge set.
WeightMatrix metropolis_weights(const Digraph& g);

// Alternating row/column normalization of the adjacency-plus-identity pattern.
// Throws std::runtime_error when the sums are not within tol after max_iters.
WeightMatrix sinkhorn_weights(const Digraph& g, double tol = 1e-12, std::size_t max_iters = 100000);

struct StochasticReport {
  bool support = true;      // positive exactly on edges and the diagonal
  bool lower_bound = true;  // diagonal and positive entries >= eta
  bool row_sums = true;
  bool column_sums = true;
  std::vector<std::string> violations;

  bool ok() const { return support && lower_bound && row_sums && column_sums; }
};

StochasticReport check_doubly_stochastic_report(const WeightMatrix& w, const Digraph& g, double eta);
bool check_doubly_stochastic(const WeightMatrix& w, const Digraph& g, double eta);

// Edge list: first line N, then one "j i" pair (1-based) per line.
void write_edge_list(std::ostream& out, const Digraph& g);
Digraph read_edge_list(std::istream& in);
void write_weights_csv(std::ostream& out, const WeightMatrix& w);
WeightMatrix read_weights_csv(std::istream& in);

}  // namespace micky
