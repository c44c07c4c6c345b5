#pragma once

// Data-parallel inner loops with a scalar reference version and vector
// variants (AVX2+FMA on x86-64, NEON on AArch64). The variant is picked at
// first use from the CPU's capabilities and can be pinned with set_isa().

#include <cstddef>
#include <span>

namespace pdmpkit::simd {

enum class Isa { scalar, avx2, neon };

const char* isa_name(Isa isa);
bool isa_supported(Isa isa);
/// Best variant the running CPU supports.
Isa detected_isa();
Isa active_isa();
/// Pin the dispatch target. Throws ValidationError if the CPU lacks `isa`.
void set_isa(Isa isa);

/// Sums used by the velocity moment estimators: Σaᵢ², Σaᵢ⁴, Σaᵢ²bᵢ².
struct PowerSums {
  double s2 = 0.0;
  double s4 = 0.0;
  double s22 = 0.0;
};

/// Largest value of the hypocoercive rate function Λ(ε) over the grid
/// ε_i = begin + i·step, i < n, and the first index attaining it.
struct GridMax {
  double value = 0.0;
  std::size_t index = 0;
};

double dot(std::span<const double> a, std::span<const double> b);
/// y += alpha·x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double sum_squares(std::span<const double> x);
PowerSums power_sums(std::span<const double> a, std::span<const double> b);
GridMax lambda_grid_max(double lambda_x, double R0, double begin, double step, std::size_t n);

/// Σ x_i x_{i+lag} over the overlap.
inline double lagged_product(std::span<const double> x, std::size_t lag) {
  if (lag >= x.size()) return 0.0;
  return dot(x.first(x.size() - lag), x.subspan(lag));
}

/// Per-ISA entry points, exposed for equivalence testing.
struct KernelTable {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  double (*sum_squares)(const double*, std::size_t);
  PowerSums (*power_sums)(const double*, const double*, std::size_t);
  GridMax (*lambda_grid_max)(double, double, double, double, std::size_t);
};

/// Table for a specific ISA; nullptr when that variant was not compiled in.
const KernelTable* kernels_for(Isa isa);

}  // namespace pdmpkit::simd
