#include <atomic>

#include "pdmpkit/errors.hpp"
#include "simd_tables.hpp"

namespace pdmpkit::simd {
namespace {

std::atomic<const KernelTable*> g_active{nullptr};
std::atomic<Isa> g_active_isa{Isa::scalar};

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    const Isa isa = detected_isa();
    t = kernels_for(isa);
    g_active_isa.store(isa, std::memory_order_relaxed);
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() {
  if (isa_supported(Isa::avx2)) return Isa::avx2;
  if (isa_supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

Isa active_isa() {
  active();
  return g_active_isa.load(std::memory_order_relaxed);
}

void set_isa(Isa isa) {
  if (!isa_supported(isa)) throw ValidationError(std::string("ISA not supported on this CPU: ") + isa_name(isa));
  g_active_isa.store(isa, std::memory_order_relaxed);
  g_active.store(kernels_for(isa), std::memory_order_release);
}

const KernelTable* kernels_for(Isa isa) {
  switch (isa) {
    case Isa::scalar: return &detail::scalar_table;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return &detail::avx2_table;
#else
      return nullptr;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return &detail::neon_table;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

double sum_squares(std::span<const double> x) { return active().sum_squares(x.data(), x.size()); }

PowerSums power_sums(std::span<const double> a, std::span<const double> b) {
  return active().power_sums(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

GridMax lambda_grid_max(double lambda_x, double R0, double begin, double step, std::size_t n) {
  return active().lambda_grid_max(lambda_x, R0, begin, step, n);
}

}  // namespace pdmpkit::simd
