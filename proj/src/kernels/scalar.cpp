#include "micky/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cstddef>

namespace micky::kernels::scalar {

void accumulate(std::span<double> out, double weight, std::span<const double> x) {
  assert(out.size() == x.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double scaled = weight * x[j];
    out[j] = out[j] + scaled;
  }
}

void project_step(std::span<double> out, std::span<const double> base, double step,
                  std::span<const double> grad) {
  assert(out.size() == base.size() && base.size() == grad.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double scaled = step * grad[j];
    out[j] = std::min(std::max(base[j] - scaled, 0.0), 1.0);
  }
}

void clamp_unit(std::span<double> values) {
  for (double& v : values) v = std::min(std::max(v, 0.0), 1.0);
}

namespace {

template <class Term>
double lane_sum(std::size_t n, Term term) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t body = n - n % 4;
  for (std::size_t j = 0; j < body; j += 4) {
    for (std::size_t l = 0; l < 4; ++l) lane[l] = lane[l] + term(j + l);
  }
  double total = (lane[0] + lane[2]) + (lane[1] + lane[3]);
  for (std::size_t j = body; j < n; ++j) total = total + term(j);
  return total;
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return lane_sum(a.size(), [&](std::size_t j) { return a[j] * b[j]; });
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return lane_sum(a.size(), [&](std::size_t j) {
    const double d = a[j] - b[j];
    return d * d;
  });
}

}  // namespace micky::kernels::scalar
