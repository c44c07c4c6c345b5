#include "pdmpkit/targets.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "pdmpkit/errors.hpp"
#include "pdmpkit/simd.hpp"

namespace pdmpkit {

const char* to_string(Domain domain) { return domain == Domain::torus ? "torus" : "euclidean"; }

void TargetConstants::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(C_P) || C_P <= 0.0) throw ValidationError("constants.C_P must be positive");
  if (!finite(c1) || c1 < 0.0) throw ValidationError("constants.c1 must be non-negative");
  if (!finite(c2) || c2 <= 0.0) throw ValidationError("constants.c2 must be positive");
  if (!finite(varpi) || varpi < 0.0) throw ValidationError("constants.varpi must be non-negative");
  if (c3 && (!finite(*c3) || *c3 < 0.0)) throw ValidationError("constants.c3 must be non-negative");
  if (L && (!finite(*L) || *L < 0.0)) throw ValidationError("constants.L must be non-negative");
}

TargetModel TargetModel::custom(std::string name, int d, Domain domain, Functions fns, TargetConstants constants) {
  if (d < 1) throw ValidationError("target dimension must be positive");
  if (!fns.value || !fns.gradient) throw ValidationError("custom target needs value and gradient functions");
  constants.validate();
  TargetModel t;
  t.name_ = std::move(name);
  t.d_ = d;
  t.domain_ = domain;
  t.fns_ = std::move(fns);
  t.constants_ = constants;
  t.mode_ = Eigen::VectorXd::Zero(d);
  return t;
}

TargetModel TargetModel::with_constants(const TargetConstants& constants) const {
  constants.validate();
  TargetModel t = *this;
  t.constants_ = constants;
  return t;
}

Eigen::VectorXd TargetModel::gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g(d_);
  gradient(std::span<const double>(x.data(), static_cast<std::size_t>(d_)),
           std::span<double>(g.data(), static_cast<std::size_t>(d_)));
  return g;
}

double TargetModel::laplacian(std::span<const double> x) const {
  if (quad_) return quad_->P.trace();
  if (!fns_.hess_diag) throw ValidationError("target '" + name_ + "' has no Hessian diagonal");
  std::vector<double> h(static_cast<std::size_t>(d_));
  fns_.hess_diag(x, h);
  double s = 0.0;
  for (double v : h) s += v;
  return s;
}

void TargetModel::sample_exact(Rng& rng, std::span<double> x) const {
  if (quad_) {
    // x = Q·diag(λ^{-1/2})·z
    Eigen::VectorXd z(d_);
    for (int i = 0; i < d_; ++i) z[i] = standard_normal(rng) / std::sqrt(quad_->evals[i]);
    Eigen::Map<Eigen::VectorXd>(x.data(), d_) = quad_->evecs * z;
    return;
  }
  if (zero_ && domain_ == Domain::torus) {
    for (double& xi : x) xi = uniform01(rng);
    return;
  }
  throw ValidationError("target '" + name_ + "' has no exact sampler");
}

TargetModel gaussian_target(const Eigen::MatrixXd& precision) {
  const Eigen::Index d = precision.rows();
  if (d < 1 || precision.cols() != d) throw ValidationError("precision must be a non-empty square matrix");
  const double scale = precision.cwiseAbs().maxCoeff();
  if ((precision - precision.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ValidationError("precision matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(precision);
  const Eigen::VectorXd& evals = eig.eigenvalues();
  if (!(evals.minCoeff() > 0.0)) throw ValidationError("precision matrix is not positive definite");

  auto quad = std::make_shared<TargetModel::Quadratic>();
  quad->P = precision;
  quad->evals = evals;
  quad->evecs = eig.eigenvectors();
  const double lmin = evals.minCoeff();
  const double lmax = evals.maxCoeff();

  const bool diagonal = precision.isDiagonal(0.0);
  TargetModel::Functions fns;
  fns.value = [quad](std::span<const double> x) {
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    return 0.5 * xv.dot(quad->P * xv);
  };
  fns.gradient = [quad](std::span<const double> x, std::span<double> g) {
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
      // P is symmetric, so row i is column i (contiguous in column-major storage).
      g[i] = simd::dot(std::span<const double>(quad->P.col(static_cast<Eigen::Index>(i)).data(), n), x);
    }
  };
  fns.hess_diag = [quad](std::span<const double>, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = quad->P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
  };
  fns.min_hess_eigenvalue = [lmin](std::span<const double>) { return lmin; };
  if (diagonal) {
    fns.curvature_bound = [quad](int k, double, double) { return quad->P(k, k); };
  }

  TargetConstants c;
  c.C_P = lmin;
  c.c1 = 0.0;
  c.c2 = lmax;
  c.varpi = 0.0;
  c.c3 = lmax - lmin;
  c.L = lmax;

  TargetModel t = TargetModel::custom("gaussian", static_cast<int>(d), Domain::euclidean, std::move(fns), c);
  t.quad_ = std::move(quad);
  return t;
}

TargetModel zero_target(int d, Domain domain) {
  TargetModel::Functions fns;
  fns.value = [](std::span<const double>) { return 0.0; };
  fns.gradient = [](std::span<const double>, std::span<double> g) { std::fill(g.begin(), g.end(), 0.0); };
  fns.hess_diag = [](std::span<const double>, std::span<double> h) { std::fill(h.begin(), h.end(), 0.0); };
  fns.min_hess_eigenvalue = [](std::span<const double>) { return 0.0; };
  fns.curvature_bound = [](int, double, double) { return 0.0; };
  TargetConstants c;
  // Spectral gap of the Laplacian on the unit torus.
  c.C_P = domain == Domain::torus ? 4.0 * M_PI * M_PI : 1.0;
  c.c1 = 0.0;
  c.c2 = 1.0;
  c.varpi = 0.0;
  c.c3 = 0.0;
  c.L = 0.0;
  TargetModel t = TargetModel::custom("zero", d, domain, std::move(fns), c);
  t.zero_ = true;
  return t;
}

double product_beta_c2(double beta) {
  const double c = std::max(2.0 / std::sqrt(beta), std::pow(2.0, 1.0 / beta));
  const double w = std::pow(1.0 + c * c, beta - 2.0);
  return beta * (std::max(1.0, w) + (2.0 * beta - 1.0) * w * c * c);
}

double radial_beta_c2(int d, double beta) {
  const double varpi = 1.0 - 1.0 / beta;
  const double dd = d;
  const double total = 4.0 * (beta - 1.0) * beta +
                       std::pow(2.0, beta - 1.0) * beta * dd * (1.0 + std::pow(2.0 * dd / beta, varpi));
  return total / std::pow(dd, 1.0 + varpi);
}

TargetModel product_beta_target(int d, double beta) {
  if (!(beta >= 1.0)) throw ValidationError("product_beta target requires beta >= 1");
  TargetModel::Functions fns;
  fns.value = [beta](std::span<const double> x) {
    double s = 0.0;
    for (double xi : x) s += std::pow(1.0 + xi * xi, beta);
    return 0.5 * s;
  };
  fns.gradient = [beta](std::span<const double> x, std::span<double> g) {
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = beta * x[i] * std::pow(1.0 + x[i] * x[i], beta - 1.0);
  };
  auto h = [beta](double s) {
    const double s2 = s * s;
    return beta * (1.0 + (2.0 * beta - 1.0) * s2) * std::pow(1.0 + s2, beta - 2.0);
  };
  fns.hess_diag = [h](std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = h(x[i]);
  };
  fns.min_hess_eigenvalue = [h](std::span<const double> x) {
    double m = h(x[0]);
    for (double xi : x) m = std::min(m, h(xi));
    return m;
  };
  // ∂²U/∂x_k² is non-decreasing in |x_k| for β ≥ 1.
  fns.curvature_bound = [h](int, double lo, double hi) {
    return h(std::max(std::abs(lo), std::abs(hi)));
  };

  TargetConstants c;
  c.C_P = beta;
  c.c1 = 0.0;
  c.c2 = product_beta_c2(beta);
  c.varpi = 0.0;
  c.c3 = 0.0;
  if (beta == 1.0) c.L = 1.0;
  TargetModel t = TargetModel::custom("product_beta", d, Domain::euclidean, std::move(fns), c);
  return t;
}

TargetModel radial_beta_target(int d, double beta) {
  if (!(beta >= 1.0)) throw ValidationError("radial_beta target requires beta >= 1");
  TargetModel::Functions fns;
  fns.value = [beta](std::span<const double> x) { return std::pow(1.0 + simd::sum_squares(x), beta); };
  fns.gradient = [beta](std::span<const double> x, std::span<double> g) {
    const double f = 2.0 * beta * std::pow(1.0 + simd::sum_squares(x), beta - 1.0);
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = f * x[i];
  };
  fns.hess_diag = [beta](std::span<const double> x, std::span<double> out) {
    const double r2 = simd::sum_squares(x);
    const double a = 2.0 * beta * std::pow(1.0 + r2, beta - 1.0);
    const double b = 4.0 * beta * (beta - 1.0) * std::pow(1.0 + r2, beta - 2.0);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = a + b * x[i] * x[i];
  };
  // Eigenvalues are a (multiplicity d−1, orthogonal to x) and a + b|x|².
  fns.min_hess_eigenvalue = [beta](std::span<const double> x) {
    const double r2 = simd::sum_squares(x);
    const double a = 2.0 * beta * std::pow(1.0 + r2, beta - 1.0);
    const double b = 4.0 * beta * (beta - 1.0) * std::pow(1.0 + r2, beta - 2.0);
    return x.size() > 1 ? a : a + b * r2;
  };

  TargetConstants c;
  c.C_P = 2.0 * beta;
  c.c1 = 0.0;
  c.varpi = 1.0 - 1.0 / beta;
  c.c2 = radial_beta_c2(d, beta);
  if (beta == 1.0) {
    c.L = 2.0;
    c.c3 = 0.0;
  }
  return TargetModel::custom("radial_beta", d, Domain::euclidean, std::move(fns), c);
}

void FieldDecomposition::field(const TargetModel& target, int k, std::span<const double> x,
                               std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  switch (kind) {
    case DecompositionKind::zigzag: {
      if (k == 0) return;
      std::vector<double> g(x.size());
      target.gradient(x, g);
      out[static_cast<std::size_t>(k - 1)] = g[static_cast<std::size_t>(k - 1)];
      return;
    }
    case DecompositionKind::bps:
      if (k == 1) target.gradient(x, out);
      return;
    case DecompositionKind::rhmc:
      if (k == 0) target.gradient(x, out);
      return;
  }
}

double FieldDecomposition::sum_a() const {
  double s = 0.0;
  for (double ak : a) s += ak;
  return s;
}

FieldDecomposition decompose_zigzag(const TargetModel& target) {
  return {DecompositionKind::zigzag, target.dim(), std::vector<double>(static_cast<std::size_t>(target.dim()), 1.0)};
}

FieldDecomposition decompose_bps(const TargetModel&) { return {DecompositionKind::bps, 1, {1.0}}; }

FieldDecomposition decompose_rhmc(const TargetModel&) { return {DecompositionKind::rhmc, 0, {}}; }

namespace {

void random_point(const TargetModel& target, Rng& rng, double box, std::span<double> x) {
  if (target.domain() == Domain::torus) {
    for (double& xi : x) xi = uniform01(rng);
  } else {
    std::uniform_real_distribution<double> u(-box, box);
    for (double& xi : x) xi = u(rng);
  }
}

double norm(std::span<const double> v) { return std::sqrt(simd::sum_squares(v)); }

}  // namespace

H2Report verify_h2(const FieldDecomposition& decomp, const TargetModel& target, int n_points, Rng& rng, double box) {
  const auto d = static_cast<std::size_t>(target.dim());
  std::vector<double> x(d), grad(d), sum(d), fk(d);
  H2Report report;
  report.points = n_points;
  for (int p = 0; p < n_points; ++p) {
    random_point(target, rng, box, x);
    target.gradient(x, grad);
    const double gnorm = norm(grad);
    std::fill(sum.begin(), sum.end(), 0.0);
    for (int k = 0; k <= decomp.K; ++k) {
      decomp.field(target, k, x, fk);
      for (std::size_t i = 0; i < d; ++i) sum[i] += fk[i];
      if (k >= 1) {
        const double excess = norm(fk) - decomp.a[static_cast<std::size_t>(k - 1)] * (1.0 + gnorm);
        if (excess > 0.0) {
          ++report.bound_violations;
          report.max_bound_violation = std::max(report.max_bound_violation, excess);
        }
      }
    }
    double diff2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) diff2 += (sum[i] - grad[i]) * (sum[i] - grad[i]);
    report.max_sum_violation = std::max(report.max_sum_violation, std::sqrt(diff2) / std::max(1.0, gnorm));
  }
  return report;
}

CertificateReport verify_certificate(const TargetModel& target, int n_points, Rng& rng, double box) {
  const auto d = static_cast<std::size_t>(target.dim());
  const TargetConstants& c = target.constants();
  const double growth = c.c2 * std::pow(static_cast<double>(d), 1.0 + c.varpi);
  std::vector<double> x(d), grad(d);
  CertificateReport report;
  report.points = n_points;
  for (int p = 0; p < n_points; ++p) {
    random_point(target, rng, box, x);
    if (target.has_min_hess_eigenvalue()) {
      const double lmin = target.min_hess_eigenvalue(x);
      const double excess = -lmin - c.c1;
      if (excess > 1e-12 * std::max(1.0, std::abs(lmin))) {
        ++report.h1_violations;
        report.max_h1_violation = std::max(report.max_h1_violation, excess);
      }
    }
    target.gradient(x, grad);
    const double lap = target.laplacian(x);
    const double rhs = growth + 0.5 * simd::sum_squares(grad);
    const double excess = lap - rhs;
    if (excess > 1e-12 * std::max(1.0, rhs)) {
      ++report.eq9_violations;
      report.max_eq9_violation = std::max(report.max_eq9_violation, excess);
    }
  }
  return report;
}

GradientCheck check_gradient(const TargetModel& target, int n_points, Rng& rng, double box) {
  const auto d = static_cast<std::size_t>(target.dim());
  std::vector<double> x(d), grad(d), xp(d);
  GradientCheck out;
  out.points = n_points;
  for (int p = 0; p < n_points; ++p) {
    random_point(target, rng, box, x);
    target.gradient(x, grad);
    const double gscale = std::max(1.0, norm(grad));
    for (std::size_t i = 0; i < d; ++i) {
      const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
      xp = x;
      xp[i] = x[i] + h;
      const double up = target.value(xp);
      xp[i] = x[i] - h;
      const double down = target.value(xp);
      const double fd = (up - down) / (2.0 * h);
      out.max_rel_error = std::max(out.max_rel_error, std::abs(fd - grad[i]) / gscale);
    }
  }
  return out;
}

}  // namespace pdmpkit
