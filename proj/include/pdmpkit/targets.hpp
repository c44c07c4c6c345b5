#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdmpkit/random.hpp"

namespace pdmpkit {

enum class Domain { euclidean, torus };

const char* to_string(Domain domain);

/// Certified constants of a potential U.
///   C_P    Poincaré constant of π ∝ e^{−U}
///   c1     ∇²U ⪰ −c1·I
///   c2, varpi   ΔU ≤ c2·d^{1+varpi} + |∇U|²/2
///   c3     off-diagonal Hessian constant (Zig-Zag specialisation)
///   L      gradient Lipschitz constant (thinning envelopes)
struct TargetConstants {
  double C_P = 1.0;
  double c1 = 0.0;
  double c2 = 1.0;
  double varpi = 0.0;
  std::optional<double> c3;
  std::optional<double> L;

  /// Throws ValidationError when a constant is outside its admissible range.
  void validate() const;
};

/// A potential U on ℝ^d or the unit torus, together with its certificate.
///
/// Immutable after construction; safe for concurrent reads.
class TargetModel {
 public:
  using ScalarFn = std::function<double(std::span<const double>)>;
  using VectorFn = std::function<void(std::span<const double>, std::span<double>)>;
  /// Upper bound of ∂²U/∂x_k² over positions whose k-th coordinate lies in [lo, hi]
  /// (separable potentials only).
  using CurvatureBoundFn = std::function<double(int k, double lo, double hi)>;

  struct Functions {
    ScalarFn value;
    VectorFn gradient;
    VectorFn hess_diag;                 // optional
    ScalarFn min_hess_eigenvalue;       // optional, exact λ_min(∇²U(x))
    CurvatureBoundFn curvature_bound;   // optional, separable targets only
  };

  /// User-defined potential. All constants must be supplied; nothing is inferred.
  static TargetModel custom(std::string name, int d, Domain domain, Functions fns, TargetConstants constants);

  const std::string& name() const { return name_; }
  int dim() const { return d_; }
  Domain domain() const { return domain_; }
  const TargetConstants& constants() const { return constants_; }
  /// Copy with user-supplied constants (e.g. a sharper Poincaré constant).
  TargetModel with_constants(const TargetConstants& constants) const;

  double value(std::span<const double> x) const { return fns_.value(x); }
  void gradient(std::span<const double> x, std::span<double> g) const { fns_.gradient(x, g); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  double laplacian(std::span<const double> x) const;

  bool has_hess_diag() const { return static_cast<bool>(fns_.hess_diag); }
  void hess_diag(std::span<const double> x, std::span<double> out) const { fns_.hess_diag(x, out); }
  bool has_min_hess_eigenvalue() const { return static_cast<bool>(fns_.min_hess_eigenvalue); }
  double min_hess_eigenvalue(std::span<const double> x) const { return fns_.min_hess_eigenvalue(x); }
  bool has_curvature_bound() const { return static_cast<bool>(fns_.curvature_bound); }
  double curvature_bound(int k, double lo, double hi) const { return fns_.curvature_bound(k, lo, hi); }

  /// Precision matrix P when U(x) = xᵀPx/2, else nullptr.
  const Eigen::MatrixXd* precision() const { return quad_ ? &quad_->P : nullptr; }
  /// Eigen-decomposition P = Q·diag(λ)·Qᵀ of the precision (quadratic targets).
  const Eigen::VectorXd* precision_eigenvalues() const { return quad_ ? &quad_->evals : nullptr; }
  const Eigen::MatrixXd* precision_eigenvectors() const { return quad_ ? &quad_->evecs : nullptr; }
  bool is_zero() const { return zero_; }

  /// Exact draws from π are available (gaussian targets, the flat torus).
  bool can_sample_exactly() const { return static_cast<bool>(quad_) || (zero_ && domain_ == Domain::torus); }
  void sample_exact(Rng& rng, std::span<double> x) const;
  /// Minimiser of U, used as the start point when exact draws are unavailable.
  Eigen::VectorXd mode() const { return mode_; }

  // Builders for the built-in families live in targets.cpp.
  friend TargetModel gaussian_target(const Eigen::MatrixXd& precision);
  friend TargetModel zero_target(int d, Domain domain);
  friend TargetModel product_beta_target(int d, double beta);
  friend TargetModel radial_beta_target(int d, double beta);

 private:
  struct Quadratic {
    Eigen::MatrixXd P;
    Eigen::VectorXd evals;
    Eigen::MatrixXd evecs;
  };

  TargetModel() = default;

  std::string name_;
  int d_ = 0;
  Domain domain_ = Domain::euclidean;
  Functions fns_;
  TargetConstants constants_;
  std::shared_ptr<const Quadratic> quad_;
  bool zero_ = false;
  Eigen::VectorXd mode_;
};

/// U(x) = xᵀPx/2 with P symmetric positive definite.
TargetModel gaussian_target(const Eigen::MatrixXd& precision);
/// U ≡ 0; on the torus π is uniform.
TargetModel zero_target(int d, Domain domain = Domain::torus);
/// U(x) = Σᵢ (1 + xᵢ²)^β / 2, β ≥ 1.
TargetModel product_beta_target(int d, double beta);
/// U(x) = (1 + |x|²)^β, β ≥ 1.
TargetModel radial_beta_target(int d, double beta);

/// c2 certificate for the product family; depends on β only.
double product_beta_c2(double beta);
/// c2 certificate for the radial family, normalised by d^{1+varpi}.
double radial_beta_c2(int d, double beta);

enum class DecompositionKind { zigzag, bps, rhmc };

/// Split ∇U = Σ_{k=0}^{K} F_k into a drift channel F_0 and K jump channels.
struct FieldDecomposition {
  DecompositionKind kind = DecompositionKind::bps;
  int K = 0;
  std::vector<double> a;  // per-channel constants a_1..a_K

  /// Writes F_k(x) into `out`; k = 0 is the drift channel.
  void field(const TargetModel& target, int k, std::span<const double> x, std::span<double> out) const;
  double sum_a() const;
};

FieldDecomposition decompose_zigzag(const TargetModel& target);
FieldDecomposition decompose_bps(const TargetModel& target);
FieldDecomposition decompose_rhmc(const TargetModel& target);

struct H2Report {
  int points = 0;
  double max_sum_violation = 0.0;    // relative |Σ F_k − ∇U| / max(1, |∇U|)
  double max_bound_violation = 0.0;  // max_k (|F_k| − a_k(1 + |∇U|))₊
  int bound_violations = 0;
  bool passed() const { return max_sum_violation <= 1e-8 && bound_violations == 0; }
};

/// Checks the field-sum identity and |F_k| ≤ a_k(1 + |∇U|) at random points
/// (uniform on [−box, box]^d, or the unit torus).
H2Report verify_h2(const FieldDecomposition& decomp, const TargetModel& target, int n_points, Rng& rng,
                   double box = 10.0);

struct CertificateReport {
  int points = 0;
  double max_h1_violation = 0.0;    // max (−λ_min(∇²U) − c1)₊
  double max_eq9_violation = 0.0;   // max (ΔU − c2·d^{1+varpi} − |∇U|²/2)₊
  int h1_violations = 0;
  int eq9_violations = 0;
  bool passed() const { return h1_violations == 0 && eq9_violations == 0; }
};

/// Grid verification of the Hessian lower bound and the Laplacian growth bound.
CertificateReport verify_certificate(const TargetModel& target, int n_points, Rng& rng, double box = 10.0);

struct GradientCheck {
  int points = 0;
  double max_rel_error = 0.0;
};

/// Central finite differences of U against ∇U.
GradientCheck check_gradient(const TargetModel& target, int n_points, Rng& rng, double box = 3.0);

}  // namespace pdmpkit
