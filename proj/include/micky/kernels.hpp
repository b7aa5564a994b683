#pragma once

// Dense inner loops shared by the engine and the metrics. Each kernel has a
// scalar reference and (on x86-64) an AVX2 variant; the variant is chosen once
// at startup from CPUID and can be pinned for testing.
//
// All variants produce bit-identical results: elementwise kernels perform the
// same two roundings per lane, and reductions accumulate in four interleaved
// lanes combined as (l0 + l2) + (l1 + l3) before the scalar tail.

#include <span>
#include <string_view>
#include <vector>

namespace micky::kernels {

enum class Variant { Scalar, Avx2 };

struct Table {
  Variant variant;
  // out[j] += weight * x[j]
  void (*accumulate)(std::span<double> out, double weight, std::span<const double> x);
  // out[j] = clamp(base[j] - step * grad[j], 0, 1)
  void (*project_step)(std::span<double> out, std::span<const double> base, double step,
                       std::span<const double> grad);
  void (*clamp_unit)(std::span<double> values);
  double (*dot)(std::span<const double> a, std::span<const double> b);
  double (*squared_distance)(std::span<const double> a, std::span<const double> b);
};

const Table& active();
std::vector<Variant> available();
bool supported(Variant v);
// Throws std::invalid_argument if the variant is not available on this CPU/build.
void select(Variant v);
std::string_view name(Variant v);

namespace scalar {
void accumulate(std::span<double> out, double weight, std::span<const double> x);
void project_step(std::span<double> out, std::span<const double> base, double step,
                  std::span<const double> grad);
void clamp_unit(std::span<double> values);
double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
}  // namespace scalar

#if defined(MICKY_WITH_AVX2)
namespace avx2 {
void accumulate(std::span<double> out, double weight, std::span<const double> x);
void project_step(std::span<double> out, std::span<const double> base, double step,
                  std::span<const double> grad);
void clamp_unit(std::span<double> values);
double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
}  // namespace avx2
#endif

// Convenience wrappers over active().
inline void accumulate(std::span<double> out, double weight, std::span<const double> x) {
  active().accumulate(out, weight, x);
}
inline void project_step(std::span<double> out, std::span<const double> base, double step,
                         std::span<const double> grad) {
  active().project_step(out, base, step, grad);
}
inline void clamp_unit(std::span<double> values) { active().clamp_unit(values); }
inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a, b);
}
inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  return active().squared_distance(a, b);
}

}  // namespace micky::kernels
