#include <immintrin.h>

#include <algorithm>
#include <cassert>
#include <cstddef>

#include "micky/kernels.hpp"

namespace micky::kernels::avx2 {

void accumulate(std::span<double> out, double weight, std::span<const double> x) {
  assert(out.size() == x.size());
  const std::size_t n = out.size();
  const std::size_t body = n - n % 4;
  const __m256d w = _mm256_set1_pd(weight);
  for (std::size_t j = 0; j < body; j += 4) {
    const __m256d scaled = _mm256_mul_pd(w, _mm256_loadu_pd(x.data() + j));
    _mm256_storeu_pd(out.data() + j, _mm256_add_pd(_mm256_loadu_pd(out.data() + j), scaled));
  }
  for (std::size_t j = body; j < n; ++j) {
    const double scaled = weight * x[j];
    out[j] = out[j] + scaled;
  }
}

void project_step(std::span<double> out, std::span<const double> base, double step,
                  std::span<const double> grad) {
  assert(out.size() == base.size() && base.size() == grad.size());
  const std::size_t n = out.size();
  const std::size_t body = n - n % 4;
  const __m256d s = _mm256_set1_pd(step);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  for (std::size_t j = 0; j < body; j += 4) {
    const __m256d scaled = _mm256_mul_pd(s, _mm256_loadu_pd(grad.data() + j));
    __m256d v = _mm256_sub_pd(_mm256_loadu_pd(base.data() + j), scaled);
    v = _mm256_min_pd(one, _mm256_max_pd(zero, v));
    _mm256_storeu_pd(out.data() + j, v);
  }
  for (std::size_t j = body; j < n; ++j) {
    const double scaled = step * grad[j];
    out[j] = std::min(std::max(base[j] - scaled, 0.0), 1.0);
  }
}

void clamp_unit(std::span<double> values) {
  const std::size_t n = values.size();
  const std::size_t body = n - n % 4;
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  for (std::size_t j = 0; j < body; j += 4) {
    __m256d v = _mm256_loadu_pd(values.data() + j);
    _mm256_storeu_pd(values.data() + j, _mm256_min_pd(one, _mm256_max_pd(zero, v)));
  }
  for (std::size_t j = body; j < n; ++j) values[j] = std::min(std::max(values[j], 0.0), 1.0);
}

namespace {

inline double reduce_lanes(__m256d acc) {
  const __m128d lo = _mm256_castpd256_pd128(acc);     // l0, l1
  const __m128d hi = _mm256_extractf128_pd(acc, 1);   // l2, l3
  const __m128d pair = _mm_add_pd(lo, hi);            // l0+l2, l1+l3
  const __m128d swapped = _mm_unpackhi_pd(pair, pair);
  return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  const std::size_t n = a.size();
  const std::size_t body = n - n % 4;
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t j = 0; j < body; j += 4) {
    const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a.data() + j), _mm256_loadu_pd(b.data() + j));
    acc = _mm256_add_pd(acc, prod);
  }
  double total = reduce_lanes(acc);
  for (std::size_t j = body; j < n; ++j) total = total + a[j] * b[j];
  return total;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  const std::size_t n = a.size();
  const std::size_t body = n - n % 4;
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t j = 0; j < body; j += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a.data() + j), _mm256_loadu_pd(b.data() + j));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double total = reduce_lanes(acc);
  for (std::size_t j = body; j < n; ++j) {
    const double d = a[j] - b[j];
    total = total + d * d;
  }
  return total;
}

}  // namespace micky::kernels::avx2
