#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdmpkit/bounds.hpp"
#include "pdmpkit/samplers.hpp"
#include "pdmpkit/scaling.hpp"

namespace pdmpkit {

struct TargetSpec {
  std::string kind = "gaussian";  // gaussian | zero | product_beta | radial_beta
  int d = 1;
  Domain domain = Domain::euclidean;
  std::vector<double> precision;  // row-major d×d, empty for identity
  std::vector<double> diagonal;   // alternative to precision
  double beta = 1.0;
  /// Explicit overrides of the certified constants.
  std::optional<double> C_P, c1, c2, varpi, c3, L;
};

struct VelocitySpec {
  VelocityKind kind = VelocityKind::gaussian;
  double m2 = 1.0;
  std::optional<double> radius;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
};

struct DiagnosticsSpec {
  double dt = 0.5;
  double burn_in = 0.1;
  std::size_t max_lag = 200;
  int coordinate = 1;  // test function f = x_coordinate
};

struct SweepSpec {
  ScalingSpec scaling;
  std::vector<int> dims;
  LambdaMode mode = LambdaMode::optimized;
};

/// One experiment, parsed from a JSON file. Every key is checked; unknown keys
/// are errors reported with their path.
struct ExperimentConfig {
  SamplerKind sampler = SamplerKind::bps;
  TargetSpec target;
  VelocitySpec velocity;
  RateFamily rate = RateFamily::canonical;
  double lambda_ref = 1.0;
  std::vector<double> lambda_ref_coord;
  double c_lambda = 0.0;
  BoundSource bound_source = BoundSource::theorem1;
  double horizon = 1000.0;
  int replicas = 1;
  std::uint64_t seed = 0;
  std::string out = "out";
  ThinningOptions thinning;
  RhmcFlowMode flow_mode = RhmcFlowMode::exact_quadratic;
  double leapfrog_step = 0.0;
  DiagnosticsSpec diagnostics;
  std::optional<SweepSpec> sweep;

  /// Canonical JSON form, used for hashing and echoed in outputs.
  nlohmann::json raw;
};

/// Throws ValidationError with messages of the form "config.target.d: …".
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

TargetModel build_target(const TargetSpec& spec);
VelocityModel build_velocity(const VelocitySpec& spec, int d);
RateFunction build_rate(RateFamily family, double m2);
SamplerConfig build_sampler_config(const ExperimentConfig& cfg, std::uint64_t replica = 0);

/// Bound report for the configured sampler and source. Validation failures
/// (missing c3, zero refreshment floor) name the offending config field.
BoundReport compute_bound(const ExperimentConfig& cfg);

}  // namespace pdmpkit
