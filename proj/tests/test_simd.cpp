#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pdmpkit/errors.hpp"
#include "pdmpkit/simd.hpp"

using namespace pdmpkit;
using simd::Isa;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

std::vector<Isa> vector_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (simd::kernels_for(isa) && simd::isa_supported(isa)) out.push_back(isa);
  }
  return out;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("scalar table is always present") {
  REQUIRE(simd::kernels_for(Isa::scalar) != nullptr);
  CHECK(simd::isa_supported(Isa::scalar));
}

TEST_CASE("vector kernels match the scalar reference across lengths and tails") {
  const auto* ref = simd::kernels_for(Isa::scalar);
  std::mt19937_64 rng(42);
  for (Isa isa : vector_isas()) {
    const auto* k = simd::kernels_for(isa);
    CAPTURE(simd::isa_name(isa));
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 1000u, 1003u}) {
      CAPTURE(n);
      const auto a = random_vector(n, rng);
      const auto b = random_vector(n, rng);
      CHECK(rel(k->dot(a.data(), b.data(), n), ref->dot(a.data(), b.data(), n)) < 1e-12);
      CHECK(rel(k->sum_squares(a.data(), n), ref->sum_squares(a.data(), n)) < 1e-12);
      const auto p = k->power_sums(a.data(), b.data(), n);
      const auto q = ref->power_sums(a.data(), b.data(), n);
      CHECK(rel(p.s2, q.s2) < 1e-12);
      CHECK(rel(p.s4, q.s4) < 1e-12);
      CHECK(rel(p.s22, q.s22) < 1e-12);
      auto y1 = b;
      auto y2 = b;
      k->axpy(0.37, a.data(), y1.data(), n);
      ref->axpy(0.37, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));
    }
  }
}

TEST_CASE("lambda grid maximum agrees between variants") {
  const auto* ref = simd::kernels_for(Isa::scalar);
  for (Isa isa : vector_isas()) {
    const auto* k = simd::kernels_for(isa);
    for (double R0 : {7.5, 8.0, 30.0, 900.0}) {
      for (double lx : {0.1, 0.5, 0.93}) {
        const double end = 4 * lx / (4 * lx + R0 * R0);
        for (std::size_t n : {1u, 5u, 1001u, 100003u}) {
          const double step = end / static_cast<double>(n);
          const auto g1 = k->lambda_grid_max(lx, R0, 0.0, step, n);
          const auto g2 = ref->lambda_grid_max(lx, R0, 0.0, step, n);
          CHECK(rel(g1.value, g2.value) < 1e-13);
          // Ties are possible only to rounding; the located points must agree in value.
          CHECK(std::abs(static_cast<double>(g1.index) - static_cast<double>(g2.index)) <= 1.0);
        }
      }
    }
  }
}

TEST_CASE("dispatch honours set_isa and rejects unsupported variants") {
  const Isa before = simd::active_isa();
  simd::set_isa(Isa::scalar);
  CHECK(simd::active_isa() == Isa::scalar);
  const std::vector<double> a{1, 2, 3};
  CHECK(simd::dot(a, a) == 14.0);
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (!simd::isa_supported(isa)) CHECK_THROWS_AS(simd::set_isa(isa), ValidationError);
  }
  simd::set_isa(before);
  CHECK(simd::active_isa() == before);
}

TEST_CASE("lagged_product handles lags beyond the series") {
  const std::vector<double> x{1, 2, 3, 4};
  CHECK(simd::lagged_product(x, 0) == 30.0);
  CHECK(simd::lagged_product(x, 1) == 1 * 2 + 2 * 3 + 3 * 4);
  CHECK(simd::lagged_product(x, 4) == 0.0);
}
