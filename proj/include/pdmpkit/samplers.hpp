#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pdmpkit/rates.hpp"
#include "pdmpkit/skeleton.hpp"
#include "pdmpkit/targets.hpp"
#include "pdmpkit/thinning.hpp"
#include "pdmpkit/velocity.hpp"

namespace pdmpkit {

enum class RhmcFlowMode { exact_quadratic, leapfrog };

struct ThinningOptions {
  double lookahead = 1.0;      // initial window h
  double max_lookahead = 1024.0;
  bool force = false;          // thin even where closed-form inversion is available
};

struct SamplerConfig {
  SamplerConfig(SamplerKind sampler, TargetModel target, VelocityModel velocity, RateFunction rate = phi_canonical());

  SamplerKind sampler;
  TargetModel target;
  VelocityModel velocity;
  RateFunction rate;
  /// Constant refreshment rate; events fire at √m2·lambda_ref.
  double lambda_ref = 1.0;
  /// Zig-Zag only: per-coordinate flip rates replacing full refreshment.
  std::vector<double> lambda_ref_coord;
  double horizon = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
  ThinningOptions thinning;
  RhmcFlowMode flow_mode = RhmcFlowMode::exact_quadratic;
  /// 0 selects 0.01/√(m2·L).
  double leapfrog_step = 0.0;
  std::optional<Eigen::VectorXd> x0;
  std::optional<Eigen::VectorXd> v0;
  /// Stop after this many bounce/refresh events (0: run to the horizon).
  std::size_t max_events = 0;

  void validate() const;
};

struct SimulationStats {
  std::size_t proposals = 0;
  std::size_t rejections = 0;
  std::size_t window_extensions = 0;
};

struct SimulationResult {
  EventSkeleton skeleton;
  SimulationStats stats;
  /// Initial position was an exact draw from π.
  bool exact_start = false;
};

SimulationResult simulate(const SamplerConfig& config);
EventSkeleton simulate_zigzag(const SamplerConfig& config);
EventSkeleton simulate_bps(const SamplerConfig& config);
EventSkeleton simulate_rhmc(const SamplerConfig& config);

/// v − 2(vᵀn)n with n = F/|F|; v unchanged when F = 0.
void reflect(std::span<double> v, std::span<const double> F);
Eigen::VectorXd reflect(const Eigen::VectorXd& v, const Eigen::VectorXd& F);
/// Negates coordinate k (1-based).
void flip_coordinate(std::span<double> v, int k);
Eigen::VectorXd flip_coordinate(const Eigen::VectorXd& v, int k);
Eigen::VectorXd refresh_full(const VelocityModel& model, Rng& rng);

/// Affine envelope on [0, h] of the event rate along x + t·v.
/// channel = 0: bouncy-particle rate φ(vᵀ∇U(x+tv));
/// channel = k ≥ 1: Zig-Zag rate φ(v_k ∂_kU(x+tv)).
PiecewiseLinearBound default_rate_bound(const TargetModel& target, const RateFunction& rate, double m2,
                                        std::span<const double> x, std::span<const double> v, double h,
                                        int channel = 0);

}  // namespace pdmpkit
