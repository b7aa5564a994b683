#include "micky/submodular.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

namespace micky {

Subset Subset::from_members(std::size_t ground_size, std::span<const Element> members) {
  Subset s(ground_size);
  for (Element e : members) s.insert(e);
  return s;
}

Subset Subset::from_mask(std::size_t ground_size, std::uint64_t bits) {
  Subset s(ground_size);
  for (std::size_t e = 0; e < ground_size && e < 64; ++e) {
    if ((bits >> e) & 1U) s.insert(e);
  }
  return s;
}

Subset Subset::full(std::size_t ground_size) {
  Subset s(ground_size);
  std::fill(s.mask_.begin(), s.mask_.end(), 1);
  s.count_ = ground_size;
  return s;
}

void Subset::insert(Element e) {
  if (e >= mask_.size()) throw std::out_of_range("subset element out of range");
  if (!mask_[e]) {
    mask_[e] = 1;
    ++count_;
  }
}

void Subset::erase(Element e) {
  if (e >= mask_.size()) throw std::out_of_range("subset element out of range");
  if (mask_[e]) {
    mask_[e] = 0;
    --count_;
  }
}

std::vector<Element> Subset::members() const {
  std::vector<Element> out;
  out.reserve(count_);
  for (Element e = 0; e < mask_.size(); ++e) {
    if (mask_[e]) out.push_back(e);
  }
  return out;
}

DenseVector Subset::indicator() const {
  DenseVector out(mask_.size());
  for (std::size_t e = 0; e < mask_.size(); ++e) out[e] = mask_[e] ? 1.0 : 0.0;
  return out;
}

SetFunction::SetFunction(std::size_t ground_size) : n_(ground_size) {
  if (ground_size == 0) throw std::invalid_argument("ground set must be nonempty");
}

void SetFunction::check_element(Element l) const {
  if (l >= n_) {
    throw std::out_of_range("element " + std::to_string(l) + " outside ground set of size " +
                            std::to_string(n_));
  }
}

double SetFunction::marginal(Element l, const Subset& S) const {
  check_element(l);
  if (S.contains(l)) throw std::invalid_argument("marginal: element already in the set");
  Subset grown = S;
  grown.insert(l);
  return eval(grown) - eval(S);
}

double SetFunction::ranked_marginal(Element l, std::span<const double> y) const {
  check_element(l);
  Subset prefix(n_);
  for (Element r = 0; r < n_; ++r) {
    if (r != l && ranks_before(y, r, l)) prefix.insert(r);
  }
  return marginal(l, prefix);
}

double SetFunction::lovasz(std::span<const double> x) const {
  if (x.size() != n_) throw std::invalid_argument("lovasz: length mismatch");
  // Abel form of the greedy sum: sum_j (x_{m_j} - x_{m_{j+1}}) F({m_1..m_j}).
  // Only nonzero gaps need a prefix value, so indicators reduce to one eval.
  const std::vector<Element> order = descending_order(x);
  Subset prefix(n_);
  double total = 0.0;
  for (std::size_t j = 0; j < n_; ++j) {
    prefix.insert(order[j]);
    const double next = j + 1 < n_ ? x[order[j + 1]] : 0.0;
    const double gap = x[order[j]] - next;
    if (gap != 0.0) total += gap * eval(prefix);
  }
  return total;
}

ModularFunction::ModularFunction(DenseVector weights)
    : SetFunction(weights.size()), weights_(std::move(weights)) {}

double ModularFunction::eval(const Subset& X) const {
  double total = 0.0;
  for (Element e = 0; e < weights_.size(); ++e) {
    if (X.contains(e)) total += weights_[e];
  }
  return total;
}

double ModularFunction::marginal(Element l, const Subset& S) const {
  check_element(l);
  if (S.contains(l)) throw std::invalid_argument("marginal: element already in the set");
  return weights_[l];
}

LambdaFunction::LambdaFunction(std::size_t ground_size, std::function<double(const Subset&)> fn)
    : SetFunction(ground_size), fn_(std::move(fn)) {}

double LambdaFunction::eval(const Subset& X) const { return fn_(X); }

namespace {
std::size_t common_ground(const std::vector<SetFunctionPtr>& terms) {
  if (terms.empty()) throw std::invalid_argument("sum of zero set functions");
  const std::size_t n = terms.front()->ground_size();
  for (const auto& t : terms) {
    if (!t || t->ground_size() != n) throw std::invalid_argument("sum: ground set mismatch");
  }
  return n;
}
}  // namespace

SumFunction::SumFunction(std::vector<SetFunctionPtr> terms)
    : SetFunction(common_ground(terms)), terms_(std::move(terms)) {}

double SumFunction::eval(const Subset& X) const {
  double total = 0.0;
  for (const auto& t : terms_) total += t->eval(X);
  return total;
}

double SumFunction::marginal(Element l, const Subset& S) const {
  check_element(l);
  if (S.contains(l)) throw std::invalid_argument("marginal: element already in the set");
  double total = 0.0;
  for (const auto& t : terms_) total += t->marginal(l, S);
  return total;
}

double SumFunction::ranked_marginal(Element l, std::span<const double> y) const {
  double total = 0.0;
  for (const auto& t : terms_) total += t->ranked_marginal(l, y);
  return total;
}

double SumFunction::lovasz(std::span<const double> x) const {
  double total = 0.0;
  for (const auto& t : terms_) total += t->lovasz(x);
  return total;
}

BlockPartition::BlockPartition(std::size_t ground_size, std::vector<std::vector<Element>> blocks)
    : n_(ground_size), blocks_(std::move(blocks)), owner_(ground_size, blocks_.size()) {
  if (n_ == 0) throw std::invalid_argument("partition of an empty ground set");
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (blocks_[b].empty()) throw std::invalid_argument("partition has an empty block");
    for (Element e : blocks_[b]) {
      if (e >= n_) throw std::invalid_argument("partition index out of range");
      if (owner_[e] != blocks_.size()) throw std::invalid_argument("partition blocks overlap");
      owner_[e] = b;
    }
  }
  for (Element e = 0; e < n_; ++e) {
    if (owner_[e] == blocks_.size()) {
      throw std::invalid_argument("partition does not cover element " + std::to_string(e));
    }
  }
}

BlockPartition BlockPartition::uniform(std::size_t ground_size, std::size_t num_blocks) {
  if (num_blocks == 0 || num_blocks > ground_size) {
    throw std::invalid_argument("block count must be in [1, n]");
  }
  std::vector<std::vector<Element>> blocks(num_blocks);
  const std::size_t base = ground_size / num_blocks;
  const std::size_t extra = ground_size % num_blocks;
  Element next = 0;
  for (std::size_t b = 0; b < num_blocks; ++b) {
    const std::size_t len = base + (b < extra ? 1 : 0);
    blocks[b].resize(len);
    std::iota(blocks[b].begin(), blocks[b].end(), next);
    next += len;
  }
  return BlockPartition(ground_size, std::move(blocks));
}

BlockPartition BlockPartition::singletons(std::size_t ground_size) {
  return uniform(ground_size, ground_size);
}

std::size_t BlockPartition::max_block_size() const {
  std::size_t m = 0;
  for (const auto& b : blocks_) m = std::max(m, b.size());
  return m;
}

std::vector<Element> descending_order(std::span<const double> y) {
  std::vector<Element> order(y.size());
  std::iota(order.begin(), order.end(), Element{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Element a, Element b) { return y[a] > y[b]; });
  return order;
}

std::vector<Element> partial_sort(std::span<const double> y, Element l) {
  if (l >= y.size()) throw std::out_of_range("partial_sort: element out of range");
  std::vector<Element> ahead;
  for (Element r = 0; r < y.size(); ++r) {
    if (r != l && ranks_before(y, r, l)) ahead.push_back(r);
  }
  std::stable_sort(ahead.begin(), ahead.end(), [&](Element a, Element b) { return y[a] > y[b]; });
  ahead.push_back(l);
  return ahead;
}

double lovasz_extension(const SetFunction& F, std::span<const double> x) {
  if (x.size() != F.ground_size()) throw std::invalid_argument("lovasz_extension: length mismatch");
  return F.lovasz(x);
}

DenseVector full_greedy_subgradient(const SetFunction& F, std::span<const double> y) {
  const std::size_t n = F.ground_size();
  if (y.size() != n) throw std::invalid_argument("full_greedy_subgradient: length mismatch");
  DenseVector w(n);
  Subset prefix(n);
  for (Element m : descending_order(y)) {
    w[m] = F.marginal(m, prefix);
    prefix.insert(m);
  }
  return w;
}

DenseVector block_greedy(const SetFunction& F, std::span<const double> y,
                         std::span<const Element> block) {
  if (y.size() != F.ground_size()) throw std::invalid_argument("block_greedy: length mismatch");
  if (block.empty()) throw std::invalid_argument("block_greedy: empty block");
  DenseVector g(block.size());
  for (std::size_t k = 0; k < block.size(); ++k) {
    if (block[k] >= y.size()) throw std::out_of_range("block_greedy: index out of range");
    g[k] = F.ranked_marginal(block[k], y);
  }
  return g;
}

namespace {

void require_exhaustive(const SetFunction& F, std::size_t limit, const char* what) {
  if (F.ground_size() > limit) {
    throw std::invalid_argument(std::string(what) + ": ground set too large for enumeration (n=" +
                                std::to_string(F.ground_size()) + ", limit " +
                                std::to_string(limit) + ")");
  }
}

std::vector<double> value_table(const SetFunction& F) {
  const std::size_t n = F.ground_size();
  std::vector<double> table(std::size_t{1} << n);
  for (std::uint64_t m = 0; m < table.size(); ++m) table[m] = F.eval(Subset::from_mask(n, m));
  return table;
}

}  // namespace

bool is_submodular(const SetFunction& F) {
  require_exhaustive(F, kMaxExhaustive, "is_submodular");
  const std::size_t n = F.ground_size();
  const std::vector<double> v = value_table(F);
  // Pairwise form of diminishing returns: F(S+i) + F(S+j) >= F(S+i+j) + F(S).
  for (std::uint64_t s = 0; s < v.size(); ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      if ((s >> i) & 1U) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if ((s >> j) & 1U) continue;
        const std::uint64_t si = s | (1ULL << i);
        const std::uint64_t sj = s | (1ULL << j);
        if (v[si] - v[s] < v[si | sj] - v[sj] - kSetTolerance) return false;
      }
    }
  }
  return true;
}

bool in_base_polyhedron(const SetFunction& F, std::span<const double> w) {
  require_exhaustive(F, kMaxExhaustive, "in_base_polyhedron");
  const std::size_t n = F.ground_size();
  if (w.size() != n) throw std::invalid_argument("in_base_polyhedron: length mismatch");
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t m = 0; m < count; ++m) {
    double lhs = 0.0;
    for (std::size_t e = 0; e < n; ++e) {
      if ((m >> e) & 1U) lhs += w[e];
    }
    const double rhs = F.eval(Subset::from_mask(n, m));
    if (lhs > rhs + kSetTolerance) return false;
    if (m == count - 1 && std::abs(lhs - rhs) > kSetTolerance) return false;
  }
  return true;
}

Subset threshold(std::span<const double> x, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("threshold must lie in [0, 1]");
  Subset out(x.size());
  for (Element e = 0; e < x.size(); ++e) {
    if (x[e] > tau) out.insert(e);
  }
  return out;
}

Minimizer brute_force_min(const SetFunction& F) {
  require_exhaustive(F, kMaxBruteForce, "brute_force_min");
  const std::size_t n = F.ground_size();
  const std::vector<double> v = value_table(F);
  const double best = *std::min_element(v.begin(), v.end());

  // Lexicographic order on the indicator (element 0 most significant) is the
  // reversed bit order of the mask.
  auto lex_key = [n](std::uint64_t m) {
    std::uint64_t key = 0;
    for (std::size_t e = 0; e < n; ++e) key = (key << 1) | ((m >> e) & 1U);
    return key;
  };
  std::uint64_t chosen = 0;
  bool found = false;
  for (std::uint64_t m = 0; m < v.size(); ++m) {
    if (v[m] > best + kSetTolerance) continue;
    if (!found) {
      chosen = m;
      found = true;
      continue;
    }
    const int pc = std::popcount(m);
    const int pchosen = std::popcount(chosen);
    if (pc < pchosen || (pc == pchosen && lex_key(m) < lex_key(chosen))) chosen = m;
  }
  return {Subset::from_mask(n, chosen), v[chosen]};
}

}  // namespace micky
