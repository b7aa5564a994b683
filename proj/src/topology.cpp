#include "micky/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>

#include "micky/random.hpp"

namespace micky {

Digraph::Digraph(std::size_t num_nodes, std::vector<std::pair<AgentId, AgentId>> edges)
    : n_(num_nodes), edges_(std::move(edges)), in_(num_nodes), out_(num_nodes) {
  for (const auto& [from, to] : edges_) {
    if (from >= n_ || to >= n_) throw std::invalid_argument("digraph: node index out of range");
    if (from == to) throw std::invalid_argument("digraph: self loops are implicit");
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (const auto& [from, to] : edges_) {
    out_[from].push_back(to);
    in_[to].push_back(from);
  }
  for (auto& v : in_) std::sort(v.begin(), v.end());
}

bool Digraph::has_edge(AgentId from, AgentId to) const {
  return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(from, to));
}

bool Digraph::is_symmetric() const {
  return std::all_of(edges_.begin(), edges_.end(),
                     [&](const auto& e) { return has_edge(e.second, e.first); });
}

double WeightMatrix::min_positive() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : data_) {
    if (v > 0.0) m = std::min(m, v);
  }
  return m;
}

Digraph erdos_renyi_strongly_connected(std::size_t n, double p, std::uint64_t seed,
                                       ErdosRenyiOptions options) {
  if (n < 2) throw std::invalid_argument("erdos-renyi: need at least two nodes");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("erdos-renyi: p must lie in (0, 1]");
  for (std::size_t attempt = 0; attempt < options.max_attempts; ++attempt) {
    std::mt19937_64 rng = make_stream(seed, attempt, StreamTag::Topology);
    std::vector<std::pair<AgentId, AgentId>> edges;
    for (AgentId from = 0; from < n; ++from) {
      for (AgentId to = 0; to < n; ++to) {
        if (from != to && uniform01(rng) < p) edges.emplace_back(from, to);
      }
    }
    Digraph g(n, std::move(edges));
    if (is_strongly_connected(g)) return g;
  }
  throw std::runtime_error("erdos-renyi: no strongly connected sample in " +
                           std::to_string(options.max_attempts) + " attempts (n=" +
                           std::to_string(n) + ", p=" + std::to_string(p) + ")");
}

namespace {
std::size_t reach_count(const Digraph& g, bool forward) {
  std::vector<bool> seen(g.size(), false);
  std::queue<AgentId> frontier;
  seen[0] = true;
  frontier.push(0);
  std::size_t count = 1;
  while (!frontier.empty()) {
    const AgentId u = frontier.front();
    frontier.pop();
    for (AgentId v : forward ? g.out_neighbors(u) : g.in_neighbors(u)) {
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        frontier.push(v);
      }
    }
  }
  return count;
}
}  // namespace

bool is_strongly_connected(const Digraph& g) {
  if (g.size() <= 1) return true;
  return reach_count(g, true) == g.size() && reach_count(g, false) == g.size();
}

Digraph symmetrize(const Digraph& g) {
  std::vector<std::pair<AgentId, AgentId>> edges = g.edges();
  for (const auto& [from, to] : g.edges()) edges.emplace_back(to, from);
  return Digraph(g.size(), std::move(edges));
}

WeightMatrix metropolis_weights(const Digraph& g) {
  if (!g.is_symmetric()) throw std::invalid_argument("metropolis weights need a symmetric graph");
  const std::size_t n = g.size();
  WeightMatrix w(n);
  for (AgentId i = 0; i < n; ++i) {
    double off_diagonal = 0.0;
    for (AgentId j : g.in_neighbors(i)) {
      const double d = static_cast<double>(
          std::max(g.in_neighbors(i).size(), g.in_neighbors(j).size()));
      w.at(i, j) = 1.0 / (1.0 + d);
      off_diagonal += w.at(i, j);
    }
    w.at(i, i) = 1.0 - off_diagonal;
  }
  return w;
}

WeightMatrix sinkhorn_weights(const Digraph& g, double tol, std::size_t max_iters) {
  const std::size_t n = g.size();
  WeightMatrix w(n);
  for (AgentId i = 0; i < n; ++i) {
    w.at(i, i) = 1.0;
    for (AgentId j : g.in_neighbors(i)) w.at(i, j) = 1.0;
  }
  auto max_deviation = [&] {
    double dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      double col = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        row += w.at(i, j);
        col += w.at(j, i);
      }
      dev = std::max({dev, std::abs(row - 1.0), std::abs(col - 1.0)});
    }
    return dev;
  };
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    if (max_deviation() <= tol) return w;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += w.at(i, j);
      for (std::size_t j = 0; j < n; ++j) w.at(i, j) /= row;
    }
    for (std::size_t j = 0; j < n; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < n; ++i) col += w.at(i, j);
      for (std::size_t i = 0; i < n; ++i) w.at(i, j) /= col;
    }
  }
  if (max_deviation() <= tol) return w;
  throw std::runtime_error("sinkhorn balancing did not converge in " + std::to_string(max_iters) +
                           " iterations; the pattern may lack doubly stochastic support");
}

StochasticReport check_doubly_stochastic_report(const WeightMatrix& w, const Digraph& g,
                                                double eta) {
  StochasticReport report;
  const std::size_t n = g.size();
  if (w.size() != n) {
    report.support = false;
    report.violations.push_back("weight support: matrix is " + std::to_string(w.size()) +
                                "x" + std::to_string(w.size()) + " but graph has " +
                                std::to_string(n) + " nodes");
    return report;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const bool allowed = i == j || g.has_edge(j, i);
      const double v = w.at(i, j);
      if (allowed != (v > 0.0) || v < 0.0) {
        if (report.support) {
          report.violations.push_back("weight support: w[" + std::to_string(i + 1) + "][" +
                                      std::to_string(j + 1) + "] = " + std::to_string(v) +
                                      (allowed ? " must be positive" : " must be zero"));
        }
        report.support = false;
      }
      if (v > 0.0 && v < eta) {
        if (report.lower_bound) {
          report.violations.push_back("weight lower bound: w[" + std::to_string(i + 1) + "][" +
                                      std::to_string(j + 1) + "] below eta = " +
                                      std::to_string(eta));
        }
        report.lower_bound = false;
      }
    }
    if (!(w.at(i, i) >= eta) && report.lower_bound) {
      report.violations.push_back("weight lower bound: diagonal entry " + std::to_string(i + 1) +
                                  " below eta");
      report.lower_bound = false;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    double col = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row += w.at(i, j);
      col += w.at(j, i);
    }
    if (std::abs(row - 1.0) > kStochasticTolerance && report.row_sums) {
      report.row_sums = false;
      report.violations.push_back("double stochasticity: row " + std::to_string(i + 1) +
                                  " sums to " + std::to_string(row));
    }
    if (std::abs(col - 1.0) > kStochasticTolerance && report.column_sums) {
      report.column_sums = false;
      report.violations.push_back("double stochasticity: column " + std::to_string(i + 1) +
                                  " sums to " + std::to_string(col));
    }
  }
  return report;
}

bool check_doubly_stochastic(const WeightMatrix& w, const Digraph& g, double eta) {
  return check_doubly_stochastic_report(w, g, eta).ok();
}

void write_edge_list(std::ostream& out, const Digraph& g) {
  out << g.size() << '\n';
  for (const auto& [from, to] : g.edges()) out << from + 1 << ' ' << to + 1 << '\n';
}

Digraph read_edge_list(std::istream& in) {
  std::size_t n = 0;
  if (!(in >> n) || n == 0) throw std::runtime_error("edge list: missing or invalid node count");
  std::vector<std::pair<AgentId, AgentId>> edges;
  long long from = 0;
  long long to = 0;
  while (in >> from) {
    if (!(in >> to)) throw std::runtime_error("edge list: dangling sender without receiver");
    if (from < 1 || to < 1 || static_cast<std::size_t>(from) > n ||
        static_cast<std::size_t>(to) > n) {
      throw std::runtime_error("edge list: node index outside 1.." + std::to_string(n));
    }
    edges.emplace_back(static_cast<AgentId>(from - 1), static_cast<AgentId>(to - 1));
  }
  if (!in.eof()) throw std::runtime_error("edge list: unparsable token");
  return Digraph(n, std::move(edges));
}

void write_weights_csv(std::ostream& out, const WeightMatrix& w) {
  char buf[32];
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = 0; j < w.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", w.at(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
}

WeightMatrix read_weights_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw std::runtime_error("weights csv: bad number '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  if (n == 0) throw std::runtime_error("weights csv: empty");
  WeightMatrix w(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw std::runtime_error("weights csv: matrix is not square");
    for (std::size_t j = 0; j < n; ++j) w.at(i, j) = rows[i][j];
  }
  return w;
}

}  // namespace micky
