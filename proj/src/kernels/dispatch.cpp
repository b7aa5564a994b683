#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "micky/kernels.hpp"

namespace micky::kernels {
namespace {

constexpr Table kScalar{Variant::Scalar, scalar::accumulate, scalar::project_step,
                        scalar::clamp_unit, scalar::dot, scalar::squared_distance};
#if defined(MICKY_WITH_AVX2)
constexpr Table kAvx2{Variant::Avx2, avx2::accumulate, avx2::project_step, avx2::clamp_unit,
                      avx2::dot, avx2::squared_distance};
#endif

bool cpu_has_avx2() {
#if defined(MICKY_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Table* table_for(Variant v) {
  switch (v) {
    case Variant::Scalar:
      return &kScalar;
    case Variant::Avx2:
#if defined(MICKY_WITH_AVX2)
      return cpu_has_avx2() ? &kAvx2 : nullptr;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const Table* initial_table() {
  // MICKY_KERNELS=scalar forces the reference path.
  if (const char* env = std::getenv("MICKY_KERNELS"); env && std::string(env) == "scalar") {
    return &kScalar;
  }
  if (const Table* t = table_for(Variant::Avx2)) return t;
  return &kScalar;
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> table{initial_table()};
  return table;
}

}  // namespace

const Table& active() { return *current().load(std::memory_order_acquire); }

bool supported(Variant v) { return table_for(v) != nullptr; }

std::vector<Variant> available() {
  std::vector<Variant> out{Variant::Scalar};
  if (supported(Variant::Avx2)) out.push_back(Variant::Avx2);
  return out;
}

void select(Variant v) {
  const Table* t = table_for(v);
  if (!t) throw std::invalid_argument("kernel variant not available: " + std::string(name(v)));
  current().store(t, std::memory_order_release);
}

std::string_view name(Variant v) {
  switch (v) {
    case Variant::Scalar:
      return "scalar";
    case Variant::Avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace micky::kernels
