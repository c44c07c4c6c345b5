#include "pdmpkit/velocity.hpp"

#include <cmath>
#include <utility>

#include "pdmpkit/errors.hpp"
#include "pdmpkit/simd.hpp"

namespace pdmpkit {
namespace {

void require_dim(int d) {
  if (d < 1) throw ValidationError("velocity dimension must be positive, got " + std::to_string(d));
}

void require_positive(double value, const char* what) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw ValidationError(std::string(what) + " must be finite and positive");
  }
}

void sample_unit_sphere(Rng& rng, std::span<double> out) {
  for (;;) {
    for (double& x : out) x = standard_normal(rng);
    const double n2 = simd::sum_squares(out);
    if (n2 > 0.0) {
      const double inv = 1.0 / std::sqrt(n2);
      for (double& x : out) x *= inv;
      return;
    }
  }
}

}  // namespace

const char* to_string(VelocityKind kind) {
  switch (kind) {
    case VelocityKind::gaussian: return "gaussian";
    case VelocityKind::sphere_uniform: return "sphere_uniform";
    case VelocityKind::rademacher: return "rademacher";
    case VelocityKind::spherically_symmetric: return "spherically_symmetric";
  }
  return "unknown";
}

VelocityKind velocity_kind_from_string(const std::string& name) {
  if (name == "gaussian") return VelocityKind::gaussian;
  if (name == "sphere_uniform") return VelocityKind::sphere_uniform;
  if (name == "rademacher") return VelocityKind::rademacher;
  if (name == "spherically_symmetric") return VelocityKind::spherically_symmetric;
  throw ValidationError("unknown velocity kind '" + name +
                        "' (expected gaussian, sphere_uniform, rademacher, spherically_symmetric)");
}

VelocityModel VelocityModel::gaussian(int d, double m2) {
  require_dim(d);
  require_positive(m2, "m2");
  VelocityModel m(d, VelocityKind::gaussian);
  m.m2_ = m2;
  m.scale_ = std::sqrt(m2);
  return m;
}

VelocityModel VelocityModel::sphere_uniform(int d, double radius) {
  require_dim(d);
  require_positive(radius, "sphere radius");
  VelocityModel m(d, VelocityKind::sphere_uniform);
  m.scale_ = radius;
  m.m2_ = radius * radius / d;
  return m;
}

VelocityModel VelocityModel::rademacher(int d, double m2) {
  require_dim(d);
  require_positive(m2, "m2");
  VelocityModel m(d, VelocityKind::rademacher);
  m.m2_ = m2;
  m.scale_ = std::sqrt(m2);
  return m;
}

VelocityModel VelocityModel::spherically_symmetric(int d, double gamma1, double gamma2, RadialSampler radial) {
  require_dim(d);
  require_positive(gamma1, "gamma1");
  require_positive(gamma2, "gamma2");
  if (gamma2 < gamma1 * gamma1 * (1.0 - 1e-12)) {
    throw ValidationError("gamma2 must be at least gamma1^2 (second moment of B dominates its squared mean)");
  }
  if (!radial) throw ValidationError("spherically symmetric velocity needs a radial sampler");
  VelocityModel m(d, VelocityKind::spherically_symmetric);
  m.gamma1_ = gamma1;
  m.gamma2_ = gamma2;
  m.m2_ = gamma1 / d;
  m.scale_ = 1.0;
  m.radial_ = std::move(radial);
  return m;
}

VelocityModel VelocityModel::spherically_symmetric(int d, double gamma1, double gamma2) {
  const double var = gamma2 - gamma1 * gamma1;
  RadialSampler radial;
  if (var <= 1e-12 * gamma1 * gamma1) {
    radial = [gamma1](Rng&) { return gamma1; };
  } else {
    const double shape = gamma1 * gamma1 / var;
    const double scale = var / gamma1;
    radial = [shape, scale](Rng& rng) { return std::gamma_distribution<double>(shape, scale)(rng); };
  }
  return spherically_symmetric(d, gamma1, gamma2, std::move(radial));
}

VelocityMoments VelocityModel::moments() const {
  const double d = d_;
  switch (kind_) {
    case VelocityKind::gaussian: return {m2_, m2_ * m2_, m2_ * m2_};
    case VelocityKind::rademacher: return {m2_, m2_ * m2_ / 3.0, m2_ * m2_};
    case VelocityKind::sphere_uniform: {
      const double r4 = scale_ * scale_ * scale_ * scale_;
      const double m4 = r4 / (d * (d + 2.0));
      return {m2_, m4, m4};
    }
    case VelocityKind::spherically_symmetric: {
      const double m4 = gamma2_ / (d * (d + 2.0));
      return {m2_, m4, m4};
    }
  }
  return {};
}

void VelocityModel::sample(Rng& rng, std::span<double> out) const {
  switch (kind_) {
    case VelocityKind::gaussian:
      for (double& x : out) x = scale_ * standard_normal(rng);
      return;
    case VelocityKind::rademacher: {
      std::uniform_int_distribution<int> coin(0, 1);
      for (double& x : out) x = coin(rng) ? scale_ : -scale_;
      return;
    }
    case VelocityKind::sphere_uniform:
      sample_unit_sphere(rng, out);
      for (double& x : out) x *= scale_;
      return;
    case VelocityKind::spherically_symmetric: {
      sample_unit_sphere(rng, out);
      const double b = radial_(rng);
      const double r = std::sqrt(b > 0.0 ? b : 0.0);
      for (double& x : out) x *= r;
      return;
    }
  }
}

Eigen::VectorXd VelocityModel::sample(Rng& rng) const {
  Eigen::VectorXd v(d_);
  sample(rng, std::span<double>(v.data(), static_cast<std::size_t>(d_)));
  return v;
}

double quadratic_form_l2(const VelocityModel& model, const Eigen::MatrixXd& M, double c) {
  const Eigen::Index d = model.dim();
  if (M.rows() != d || M.cols() != d) {
    throw ValidationError("quadratic form matrix must be " + std::to_string(d) + "x" + std::to_string(d));
  }
  const double scale = M.cwiseAbs().maxCoeff();
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ValidationError("quadratic form matrix is not symmetric");
  }
  const VelocityMoments m = model.moments();
  const double hadamard = M.diagonal().squaredNorm();
  const double tr = M.trace();
  const double tr_sq = M.squaredNorm();  // Tr(M²) = Σ M_ij² for symmetric M
  const double centred = m.m2 * tr - c;
  // The (m22 − m2²)·Tr(M)² term vanishes for Gaussian and Rademacher laws but
  // not for sphere-based ones, where E[v₁²v₂²] ≠ E[v₁²]².
  return 3.0 * (m.m4 - m.m22) * hadamard + centred * centred + (m.m22 - m.m2 * m.m2) * tr * tr +
         2.0 * m.m22 * tr_sq;
}

double mb_factor(const VelocityMoments& m) {
  const double excess = m.m4 - m.m22;
  return std::sqrt(2.0 * m.m22 + 3.0 * (excess > 0.0 ? excess : 0.0)) / m.m2;
}

double mb_factor(const VelocityModel& model) { return mb_factor(model.moments()); }

}  // namespace pdmpkit
