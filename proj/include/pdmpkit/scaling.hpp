#pragma once

#include <string>
#include <vector>

#include "pdmpkit/bounds.hpp"

namespace pdmpkit {

/// Target families whose constants are known in closed form for every d.
enum class ScalingFamily { gaussian, product_beta, radial_beta };
/// zz_crude: the general bound with K = d Zig-Zag channels.
/// zz_t17: the Zig-Zag specialisation (needs c3).
enum class ScalingSampler { rhmc, bps, zz_crude, zz_t17 };
enum class LambdaMode { fixed, optimized };

const char* to_string(ScalingFamily f);
const char* to_string(ScalingSampler s);
const char* to_string(LambdaMode m);
ScalingFamily scaling_family_from_string(const std::string& name);
ScalingSampler scaling_sampler_from_string(const std::string& name);
LambdaMode lambda_mode_from_string(const std::string& name);

struct ScalingSpec {
  ScalingFamily family = ScalingFamily::gaussian;
  ScalingSampler sampler = ScalingSampler::bps;
  double beta = 1.0;        // product_beta / radial_beta exponent
  double m2 = 1.0;          // velocity second moment
  double lambda_ref = 1.0;  // used in fixed mode
  RateCertificate rate;
};

/// Bound inputs for the family at dimension d and refreshment rate lambda.
/// Zig-Zag rows use Rademacher velocities, the others Gaussian ones.
BoundInputs scaling_inputs(const ScalingSpec& spec, int d, double lambda);
BoundReport scaling_bound(const ScalingSpec& spec, int d, double lambda);

struct LambdaOptimum {
  double lambda = 0.0;
  double alpha = 0.0;
};

/// Maximises α over λ̲ ∈ [1e-3, 1e3·√(1 + K²d^{1+ϖ})]: golden section in log λ̲,
/// cross-checked against a 1000-point log grid; the better value is kept.
LambdaOptimum optimize_lambda(const ScalingSpec& spec, int d);

struct ScalingRow {
  int d = 0;
  double lambda_opt = 0.0;
  double alpha = 0.0;
  double alpha_inv = 0.0;
  double slope = 0.0;  // local slope of log α⁻¹ against log d; NaN on the first row
};

struct ScalingTable {
  ScalingSpec spec;
  LambdaMode mode = LambdaMode::fixed;
  std::vector<ScalingRow> rows;
  double fitted_slope = 0.0;  // least-squares slope over all rows
};

ScalingTable scaling_report(const ScalingSpec& spec, const std::vector<int>& dims, LambdaMode mode, int jobs = 1);

/// Least-squares slope of y against x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pdmpkit
