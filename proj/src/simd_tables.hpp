#pragma once

#include "pdmpkit/simd.hpp"

namespace pdmpkit::simd::detail {

extern const KernelTable scalar_table;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable avx2_table;
#endif
#if defined(__aarch64__)
extern const KernelTable neon_table;
#endif

// Λ(ε) written without the cancellation in 1 − ε(1−λx) − √R(ε).
inline double lambda_stable(double lambda_x, double R0, double eps) {
  const double a = 1.0 - eps * (1.0 - lambda_x);
  const double q = 4.0 * eps * lambda_x * (1.0 - eps) - eps * eps * R0 * R0;
  double rad = a * a - q;
  if (rad < 0.0) rad = 0.0;
  return q / (2.0 * (a + __builtin_sqrt(rad)));
}

}  // namespace pdmpkit::simd::detail
