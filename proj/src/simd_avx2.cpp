// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "simd_tables.hpp"

namespace pdmpkit::simd::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum_squares_avx2(const double* x, std::size_t n) { return dot_avx2(x, x, n); }

PowerSums power_sums_avx2(const double* a, const double* b, std::size_t n) {
  __m256d s2 = _mm256_setzero_pd();
  __m256d s4 = _mm256_setzero_pd();
  __m256d s22 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    const __m256d a2 = _mm256_mul_pd(va, va);
    const __m256d b2 = _mm256_mul_pd(vb, vb);
    s2 = _mm256_add_pd(s2, a2);
    s4 = _mm256_fmadd_pd(a2, a2, s4);
    s22 = _mm256_fmadd_pd(a2, b2, s22);
  }
  PowerSums out{hsum(s2), hsum(s4), hsum(s22)};
  for (; i < n; ++i) {
    const double a2 = a[i] * a[i];
    const double b2 = b[i] * b[i];
    out.s2 += a2;
    out.s4 += a2 * a2;
    out.s22 += a2 * b2;
  }
  return out;
}

GridMax lambda_grid_max_avx2(double lambda_x, double R0, double begin, double step, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d om_lx = _mm256_set1_pd(1.0 - lambda_x);
  const __m256d four_lx = _mm256_set1_pd(4.0 * lambda_x);
  const __m256d r0sq = _mm256_set1_pd(R0 * R0);
  const __m256d vbegin = _mm256_set1_pd(begin);
  const __m256d vstep = _mm256_set1_pd(step);
  __m256d idx = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
  const __m256d four = _mm256_set1_pd(4.0);
  __m256d best = _mm256_set1_pd(-1.0);
  __m256d best_idx = zero;

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d eps = _mm256_add_pd(vbegin, _mm256_mul_pd(idx, vstep));
    const __m256d a = _mm256_sub_pd(one, _mm256_mul_pd(eps, om_lx));
    const __m256d q = _mm256_sub_pd(_mm256_mul_pd(_mm256_mul_pd(four_lx, eps), _mm256_sub_pd(one, eps)),
                                    _mm256_mul_pd(_mm256_mul_pd(eps, eps), r0sq));
    const __m256d rad = _mm256_max_pd(_mm256_sub_pd(_mm256_mul_pd(a, a), q), zero);
    const __m256d v = _mm256_div_pd(q, _mm256_mul_pd(two, _mm256_add_pd(a, _mm256_sqrt_pd(rad))));
    const __m256d gt = _mm256_cmp_pd(v, best, _CMP_GT_OQ);
    best = _mm256_blendv_pd(best, v, gt);
    best_idx = _mm256_blendv_pd(best_idx, idx, gt);
    idx = _mm256_add_pd(idx, four);
  }

  alignas(32) double vals[4];
  alignas(32) double ids[4];
  _mm256_store_pd(vals, best);
  _mm256_store_pd(ids, best_idx);
  GridMax out{-1.0, 0};
  for (int lane = 0; lane < 4; ++lane) {
    const auto li = static_cast<std::size_t>(ids[lane]);
    if (vals[lane] > out.value || (vals[lane] == out.value && li < out.index)) out = {vals[lane], li};
  }
  for (; i < n; ++i) {
    const double v = lambda_stable(lambda_x, R0, begin + static_cast<double>(i) * step);
    if (v > out.value) out = {v, i};
  }
  return out;
}

}  // namespace

const KernelTable avx2_table{dot_avx2, axpy_avx2, sum_squares_avx2, power_sums_avx2, lambda_grid_max_avx2};

}  // namespace pdmpkit::simd::detail
