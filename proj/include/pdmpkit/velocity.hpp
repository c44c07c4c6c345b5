#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>

#include "pdmpkit/random.hpp"

namespace pdmpkit {

enum class VelocityKind { gaussian, sphere_uniform, rademacher, spherically_symmetric };

const char* to_string(VelocityKind kind);
VelocityKind velocity_kind_from_string(const std::string& name);

/// Closed-form marginal moments of a velocity law ν:
/// m2 = E[v₁²], m4 = E[v₁⁴]/3, m22 = E[v₁²v₂²].
struct VelocityMoments {
  double m2 = 0.0;
  double m4 = 0.0;
  double m22 = 0.0;
};

/// A radially symmetric or product velocity law on ℝ^d.
///
/// Spherically symmetric laws are V = B^{1/2}W with W uniform on the unit
/// sphere and B a non-negative radial variable with E[B] = gamma1 and
/// E[B²] = gamma2. Only the two radial moments enter the moments; the
/// sampler draws B from `radial`.
class VelocityModel {
 public:
  using RadialSampler = std::function<double(Rng&)>;

  static VelocityModel gaussian(int d, double m2);
  /// Uniform on the sphere of the given radius; m2 = radius²/d.
  static VelocityModel sphere_uniform(int d, double radius = 1.0);
  /// Uniform on {−√m2, +√m2}^d.
  static VelocityModel rademacher(int d, double m2);
  static VelocityModel spherically_symmetric(int d, double gamma1, double gamma2, RadialSampler radial);
  /// Spherically symmetric law with a moment-matched Gamma radial variable
  /// (a point mass when gamma2 == gamma1²).
  static VelocityModel spherically_symmetric(int d, double gamma1, double gamma2);

  int dim() const { return d_; }
  VelocityKind kind() const { return kind_; }
  double m2() const { return m2_; }
  /// Sphere radius for sphere_uniform; coordinate magnitude for rademacher.
  double scale() const { return scale_; }
  double gamma1() const { return gamma1_; }
  double gamma2() const { return gamma2_; }
  /// Rotation invariance (needed by the bouncy particle sampler).
  bool rotation_invariant() const { return kind_ != VelocityKind::rademacher; }

  VelocityMoments moments() const;
  void sample(Rng& rng, std::span<double> out) const;
  Eigen::VectorXd sample(Rng& rng) const;

 private:
  VelocityModel(int d, VelocityKind kind) : d_(d), kind_(kind) {}

  int d_;
  VelocityKind kind_;
  double m2_ = 1.0;
  double scale_ = 1.0;
  double gamma1_ = 0.0;
  double gamma2_ = 0.0;
  RadialSampler radial_;
};

/// ‖vᵀMv − c‖²_ν for symmetric M:
/// 3(m4 − m22)·Tr(M⊙M) + (m2·Tr M − c)² + (m22 − m2²)·(Tr M)² + 2·m22·Tr(M²).
double quadratic_form_l2(const VelocityModel& model, const Eigen::MatrixXd& M, double c);

/// √(2·m22 + 3·(m4 − m22)₊) / m2, the velocity factor of the general R̄₀.
double mb_factor(const VelocityModel& model);
double mb_factor(const VelocityMoments& m);

}  // namespace pdmpkit
