#include "simd_tables.hpp"

namespace pdmpkit::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_squares_scalar(const double* x, std::size_t n) { return dot_scalar(x, x, n); }

PowerSums power_sums_scalar(const double* a, const double* b, std::size_t n) {
  PowerSums out;
  for (std::size_t i = 0; i < n; ++i) {
    const double a2 = a[i] * a[i];
    const double b2 = b[i] * b[i];
    out.s2 += a2;
    out.s4 += a2 * a2;
    out.s22 += a2 * b2;
  }
  return out;
}

GridMax lambda_grid_max_scalar(double lambda_x, double R0, double begin, double step, std::size_t n) {
  GridMax best{-1.0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const double eps = begin + static_cast<double>(i) * step;
    const double v = lambda_stable(lambda_x, R0, eps);
    if (v > best.value) best = {v, i};
  }
  return best;
}

}  // namespace

const KernelTable scalar_table{dot_scalar, axpy_scalar, sum_squares_scalar, power_sums_scalar,
                               lambda_grid_max_scalar};

}  // namespace pdmpkit::simd::detail
