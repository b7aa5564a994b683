#pragma once

// Set functions on a finite ground set, the Lovász extension, greedy
// subgradients (full and per-component) and small-n exhaustive checkers.
//
// Elements are 0-based indices into the ground set {0, ..., n-1}.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace micky {

using Element = std::size_t;
using DenseVector = std::vector<double>;

// Absolute tolerance for every set-function comparison in the checkers.
inline constexpr double kSetTolerance = 1e-9;

// Largest ground set the exhaustive checkers accept.
inline constexpr std::size_t kMaxExhaustive = 16;
inline constexpr std::size_t kMaxBruteForce = 20;

class Subset {
 public:
  Subset() = default;
  explicit Subset(std::size_t ground_size) : mask_(ground_size, 0) {}

  static Subset from_members(std::size_t ground_size, std::span<const Element> members);
  static Subset from_mask(std::size_t ground_size, std::uint64_t bits);
  static Subset full(std::size_t ground_size);

  std::size_t ground_size() const { return mask_.size(); }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  bool contains(Element e) const { return e < mask_.size() && mask_[e] != 0; }

  void insert(Element e);
  void erase(Element e);

  std::vector<Element> members() const;
  DenseVector indicator() const;

  friend bool operator==(const Subset& a, const Subset& b) { return a.mask_ == b.mask_; }

 private:
  std::vector<std::uint8_t> mask_;
  std::size_t count_ = 0;
};

// Normalized set function F : 2^V -> R with F(empty) = 0. Implementations are
// immutable after construction and safe to share across threads.
class SetFunction {
 public:
  explicit SetFunction(std::size_t ground_size);
  virtual ~SetFunction() = default;

  std::size_t ground_size() const { return n_; }

  virtual double eval(const Subset& X) const = 0;

  // F(S + l) - F(S). Throws std::invalid_argument if l is in S.
  virtual double marginal(Element l, const Subset& S) const;

  // Marginal of l with respect to the set of elements ranked ahead of it when
  // y is sorted descending with ascending-index tie-break. Overrides must agree
  // bit for bit with marginal(l, prefix).
  virtual double ranked_marginal(Element l, std::span<const double> y) const;

  // Lovász extension at x. The default walks the greedy chain with one eval
  // per prefix; overrides must coincide with eval() on indicator vectors.
  virtual double lovasz(std::span<const double> x) const;

 protected:
  void check_element(Element l) const;

 private:
  std::size_t n_;
};

using SetFunctionPtr = std::shared_ptr<const SetFunction>;

// F(X) = sum of weights over X.
class ModularFunction final : public SetFunction {
 public:
  explicit ModularFunction(DenseVector weights);
  double eval(const Subset& X) const override;
  double marginal(Element l, const Subset& S) const override;

 private:
  DenseVector weights_;
};

// Wraps an arbitrary callable. Used mostly for tests and ad hoc functions.
class LambdaFunction final : public SetFunction {
 public:
  LambdaFunction(std::size_t ground_size, std::function<double(const Subset&)> fn);
  double eval(const Subset& X) const override;

 private:
  std::function<double(const Subset&)> fn_;
};

// Pointwise sum of set functions on a common ground set.
class SumFunction final : public SetFunction {
 public:
  explicit SumFunction(std::vector<SetFunctionPtr> terms);
  double eval(const Subset& X) const override;
  double marginal(Element l, const Subset& S) const override;
  double ranked_marginal(Element l, std::span<const double> y) const override;
  double lovasz(std::span<const double> x) const override;

  const std::vector<SetFunctionPtr>& terms() const { return terms_; }

 private:
  std::vector<SetFunctionPtr> terms_;
};

class BlockPartition {
 public:
  BlockPartition() = default;
  // Validates disjointness, full cover of {0..n-1} and nonempty blocks.
  BlockPartition(std::size_t ground_size, std::vector<std::vector<Element>> blocks);

  // B contiguous blocks whose sizes differ by at most one.
  static BlockPartition uniform(std::size_t ground_size, std::size_t num_blocks);
  static BlockPartition singletons(std::size_t ground_size);

  std::size_t ground_size() const { return n_; }
  std::size_t num_blocks() const { return blocks_.size(); }
  std::span<const Element> block(std::size_t b) const { return blocks_.at(b); }
  std::size_t max_block_size() const;
  std::size_t block_of(Element e) const { return owner_.at(e); }

 private:
  std::size_t n_ = 0;
  std::vector<std::vector<Element>> blocks_;
  std::vector<std::size_t> owner_;
};

// True when r precedes l in the descending order of y (ties: lower index first).
inline bool ranks_before(std::span<const double> y, Element r, Element l) {
  return y[r] > y[l] || (y[r] == y[l] && r < l);
}

// Full descending order of y with ascending-index tie-break.
std::vector<Element> descending_order(std::span<const double> y);

// {m_1, ..., m_p = l}: the prefix of descending_order(y) ending at l.
std::vector<Element> partial_sort(std::span<const double> y, Element l);

double lovasz_extension(const SetFunction& F, std::span<const double> x);

DenseVector full_greedy_subgradient(const SetFunction& F, std::span<const double> y);

// Components of a greedy subgradient at y for the elements of one block, in
// block order.
DenseVector block_greedy(const SetFunction& F, std::span<const double> y,
                         std::span<const Element> block);

bool is_submodular(const SetFunction& F);
bool in_base_polyhedron(const SetFunction& F, std::span<const double> w);

// {l : x_l > tau}
Subset threshold(std::span<const double> x, double tau);

struct Minimizer {
  Subset set;
  double value;
};

// Exhaustive minimization. Ties (within kSetTolerance of the minimum) go to the
// smallest cardinality, then to the lexicographically smallest indicator.
Minimizer brute_force_min(const SetFunction& F);

}  // namespace micky
