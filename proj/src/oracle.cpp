#include "micky/oracle.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>

namespace micky {

double FlowNetwork::cut_value(const Subset& X) const {
  if (X.ground_size() != num_pixels) throw std::invalid_argument("cut value: subset size");
  double total = 0.0;
  for (Element p = 0; p < num_pixels; ++p) {
    total += X.contains(p) ? sink_capacity[p] : source_capacity[p];
  }
  for (const CutEdge& e : pairs) {
    if (X.contains(e.p) != X.contains(e.q)) total += e.weight;
  }
  return total;
}

FlowNetwork build_flow_network(std::span<const AgentWeights> agents, std::size_t num_pixels) {
  FlowNetwork net;
  net.num_pixels = num_pixels;
  net.source_capacity.assign(num_pixels, 0.0);
  net.sink_capacity.assign(num_pixels, 0.0);
  std::vector<CutEdge> all;
  for (const AgentWeights& a : agents) {
    if (a.source.size() != num_pixels || a.sink.size() != num_pixels) {
      throw std::invalid_argument("flow network: agent weights have the wrong dimension");
    }
    for (Element p = 0; p < num_pixels; ++p) {
      net.source_capacity[p] += a.source[p];
      net.sink_capacity[p] += a.sink[p];
    }
    for (CutEdge e : a.edges) {
      if (e.p >= num_pixels || e.q >= num_pixels || e.p == e.q) {
        throw std::invalid_argument("flow network: bad pairwise edge");
      }
      if (e.p > e.q) std::swap(e.p, e.q);
      all.push_back(e);
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const CutEdge& a, const CutEdge& b) {
    return a.p != b.p ? a.p < b.p : a.q < b.q;
  });
  for (const CutEdge& e : all) {
    if (!net.pairs.empty() && net.pairs.back().p == e.p && net.pairs.back().q == e.q) {
      net.pairs.back().weight += e.weight;
    } else {
      net.pairs.push_back(e);
    }
  }
  return net;
}

FlowNetwork build_flow_network(const CutInstance& instance) {
  return build_flow_network(instance.agents, instance.num_pixels());
}

namespace {

struct Arc {
  std::size_t to;
  std::size_t reverse;  // index of the paired arc in adjacency[to]
  double residual;
};

class Residual {
 public:
  explicit Residual(std::size_t nodes) : adj_(nodes) {}

  // Adds u->v with capacity cap_uv and v->u with capacity cap_vu as one pair.
  void add(std::size_t u, std::size_t v, double cap_uv, double cap_vu) {
    adj_[u].push_back({v, adj_[v].size(), cap_uv});
    adj_[v].push_back({u, adj_[u].size() - 1, cap_vu});
  }

  void sort_neighbors() {
    // Keep reverse indices valid by sorting through a permutation.
    for (std::size_t u = 0; u < adj_.size(); ++u) {
      std::vector<std::size_t> perm(adj_[u].size());
      for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
      std::stable_sort(perm.begin(), perm.end(),
                       [&](std::size_t a, std::size_t b) { return adj_[u][a].to < adj_[u][b].to; });
      std::vector<std::size_t> where(perm.size());
      for (std::size_t k = 0; k < perm.size(); ++k) where[perm[k]] = k;
      std::vector<Arc> sorted(perm.size());
      for (std::size_t k = 0; k < perm.size(); ++k) sorted[k] = adj_[u][perm[k]];
      adj_[u] = std::move(sorted);
      for (std::size_t k = 0; k < adj_[u].size(); ++k) {
        const Arc& a = adj_[u][k];
        adj_[a.to][a.reverse].reverse = k;
      }
    }
  }

  std::vector<std::vector<Arc>>& arcs() { return adj_; }

 private:
  std::vector<std::vector<Arc>> adj_;
};

}  // namespace

MinCut max_flow_min_cut(const FlowNetwork& net) {
  const std::size_t n = net.num_pixels;
  const std::size_t s = n;
  const std::size_t t = n + 1;
  Residual graph(n + 2);
  for (Element p = 0; p < n; ++p) {
    if (net.source_capacity[p] > 0.0) graph.add(s, p, net.source_capacity[p], 0.0);
    if (net.sink_capacity[p] > 0.0) graph.add(p, t, net.sink_capacity[p], 0.0);
  }
  for (const CutEdge& e : net.pairs) {
    if (e.weight > 0.0) graph.add(e.p, e.q, e.weight, e.weight);
  }
  graph.sort_neighbors();
  auto& adj = graph.arcs();

  MinCut result;
  std::vector<std::size_t> parent_node(n + 2);
  std::vector<std::size_t> parent_arc(n + 2);
  std::vector<bool> seen(n + 2);
  for (;;) {
    std::fill(seen.begin(), seen.end(), false);
    std::queue<std::size_t> frontier;
    frontier.push(s);
    seen[s] = true;
    while (!frontier.empty() && !seen[t]) {
      const std::size_t u = frontier.front();
      frontier.pop();
      for (std::size_t k = 0; k < adj[u].size(); ++k) {
        const Arc& a = adj[u][k];
        if (!seen[a.to] && a.residual > kResidualFloor) {
          seen[a.to] = true;
          parent_node[a.to] = u;
          parent_arc[a.to] = k;
          frontier.push(a.to);
        }
      }
    }
    if (!seen[t]) break;
    double bottleneck = std::numeric_limits<double>::infinity();
    for (std::size_t v = t; v != s; v = parent_node[v]) {
      bottleneck = std::min(bottleneck, adj[parent_node[v]][parent_arc[v]].residual);
    }
    for (std::size_t v = t; v != s; v = parent_node[v]) {
      Arc& a = adj[parent_node[v]][parent_arc[v]];
      a.residual -= bottleneck;
      adj[v][a.reverse].residual += bottleneck;
    }
    result.flow_value += bottleneck;
    ++result.augmentations;
  }

  // seen[] holds the s-reachable set of the final residual graph.
  result.source_side = Subset(n);
  for (Element p = 0; p < n; ++p) {
    if (seen[p]) result.source_side.insert(p);
  }
  result.cut_value = net.cut_value(result.source_side);
  return result;
}

}  // namespace micky
