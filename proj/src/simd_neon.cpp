#if defined(__aarch64__)
#include <arm_neon.h>

#include "simd_tables.hpp"

namespace pdmpkit::simd::detail {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum_squares_neon(const double* x, std::size_t n) { return dot_neon(x, x, n); }

PowerSums power_sums_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t s2 = vdupq_n_f64(0.0);
  float64x2_t s4 = vdupq_n_f64(0.0);
  float64x2_t s22 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t va = vld1q_f64(a + i);
    const float64x2_t vb = vld1q_f64(b + i);
    const float64x2_t a2 = vmulq_f64(va, va);
    const float64x2_t b2 = vmulq_f64(vb, vb);
    s2 = vaddq_f64(s2, a2);
    s4 = vfmaq_f64(s4, a2, a2);
    s22 = vfmaq_f64(s22, a2, b2);
  }
  PowerSums out{vaddvq_f64(s2), vaddvq_f64(s4), vaddvq_f64(s22)};
  for (; i < n; ++i) {
    const double a2 = a[i] * a[i];
    const double b2 = b[i] * b[i];
    out.s2 += a2;
    out.s4 += a2 * a2;
    out.s22 += a2 * b2;
  }
  return out;
}

// Λ is sqrt/div bound; the scalar loop is already the bottleneck-equivalent here.
GridMax lambda_grid_max_neon(double lambda_x, double R0, double begin, double step, std::size_t n) {
  return scalar_table.lambda_grid_max(lambda_x, R0, begin, step, n);
}

}  // namespace

const KernelTable neon_table{dot_neon, axpy_neon, sum_squares_neon, power_sums_neon, lambda_grid_max_neon};

}  // namespace pdmpkit::simd::detail
#endif
