#include <doctest.h>

#include <cstring>
#include <random>

#include "micky/kernels.hpp"
#include "micky/random.hpp"

using namespace micky;

namespace {

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = lo + (hi - lo) * uniform01(rng);
  return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("scalar kernels compute the documented formulas") {
  std::vector<double> out{1.0, 2.0, 3.0};
  const std::vector<double> x{0.5, -1.0, 2.0};
  kernels::scalar::accumulate(out, 2.0, x);
  CHECK(out == std::vector<double>{2.0, 0.0, 7.0});

  std::vector<double> proj(3);
  kernels::scalar::project_step(proj, std::vector<double>{0.5, 0.1, 0.9}, 0.5,
                                std::vector<double>{0.4, 1.0, -1.0});
  CHECK(proj[0] == doctest::Approx(0.3));
  CHECK(proj[1] == 0.0);
  CHECK(proj[2] == 1.0);

  std::vector<double> c{-0.5, 0.25, 1.5};
  kernels::scalar::clamp_unit(c);
  CHECK(c == std::vector<double>{0.0, 0.25, 1.0});

  CHECK(kernels::scalar::dot(std::vector<double>{1, 2, 3, 4, 5}, std::vector<double>{1, 1, 1, 1, 2}) == 20.0);
  CHECK(kernels::scalar::squared_distance(std::vector<double>{1, 0}, std::vector<double>{0, 0}) == 1.0);
}

TEST_CASE("scalar is always available and can be pinned") {
  CHECK(kernels::supported(kernels::Variant::Scalar));
  const kernels::Variant before = kernels::active().variant;
  kernels::select(kernels::Variant::Scalar);
  CHECK(kernels::active().variant == kernels::Variant::Scalar);
  kernels::select(before);
  CHECK(kernels::name(kernels::Variant::Scalar) == "scalar");
}

#if defined(MICKY_WITH_AVX2)
TEST_CASE("avx2 kernels are bit-identical to scalar") {
  if (!kernels::supported(kernels::Variant::Avx2)) {
    MESSAGE("CPU lacks AVX2; skipping");
    return;
  }
  std::mt19937_64 rng = make_stream(5, 0, StreamTag::Workload);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 13u, 64u, 103u, 4096u}) {
    CAPTURE(n);
    const auto x = random_values(rng, n, -3.0, 3.0);
    const auto base = random_values(rng, n, -0.2, 1.2);
    const auto grad = random_values(rng, n, -50.0, 50.0);
    const double w = uniform01(rng);
    const double step = 0.01 + uniform01(rng);

    auto a = random_values(rng, n, -1.0, 1.0);
    auto b = a;
    kernels::scalar::accumulate(a, w, x);
    kernels::avx2::accumulate(b, w, x);
    CHECK(same_bits(a, b));

    std::vector<double> pa(n), pb(n);
    kernels::scalar::project_step(pa, base, step, grad);
    kernels::avx2::project_step(pb, base, step, grad);
    CHECK(same_bits(pa, pb));

    auto ca = x;
    auto cb = x;
    kernels::scalar::clamp_unit(ca);
    kernels::avx2::clamp_unit(cb);
    CHECK(same_bits(ca, cb));

    CHECK(same_bits(kernels::scalar::dot(x, base), kernels::avx2::dot(x, base)));
    CHECK(same_bits(kernels::scalar::squared_distance(x, base),
                    kernels::avx2::squared_distance(x, base)));
  }
}

TEST_CASE("avx2 clamp maps negative zero and NaN like scalar") {
  if (!kernels::supported(kernels::Variant::Avx2)) return;
  std::vector<double> a{-0.0, 0.0, 1.0, 1.0 + 1e-16, -1e-300, 0.5, 2.0, -2.0};
  auto b = a;
  kernels::scalar::clamp_unit(a);
  kernels::avx2::clamp_unit(b);
  CHECK(same_bits(a, b));
}
#endif
