#include "pdmpkit/scaling.hpp"

#include <cmath>
#include <limits>

#include "pdmpkit/errors.hpp"
#include "pdmpkit/parallel.hpp"

namespace pdmpkit {

const char* to_string(ScalingFamily f) {
  switch (f) {
    case ScalingFamily::gaussian: return "gaussian";
    case ScalingFamily::product_beta: return "product_beta";
    case ScalingFamily::radial_beta: return "radial_beta";
  }
  return "?";
}

const char* to_string(ScalingSampler s) {
  switch (s) {
    case ScalingSampler::rhmc: return "rhmc";
    case ScalingSampler::bps: return "bps";
    case ScalingSampler::zz_crude: return "zz_crude";
    case ScalingSampler::zz_t17: return "zz_t17";
  }
  return "?";
}

const char* to_string(LambdaMode m) { return m == LambdaMode::fixed ? "fixed" : "optimized"; }

ScalingFamily scaling_family_from_string(const std::string& name) {
  if (name == "gaussian") return ScalingFamily::gaussian;
  if (name == "product_beta") return ScalingFamily::product_beta;
  if (name == "radial_beta") return ScalingFamily::radial_beta;
  throw ValidationError("unknown scaling family '" + name + "' (expected gaussian, product_beta or radial_beta)");
}

ScalingSampler scaling_sampler_from_string(const std::string& name) {
  if (name == "rhmc") return ScalingSampler::rhmc;
  if (name == "bps") return ScalingSampler::bps;
  if (name == "zz_crude") return ScalingSampler::zz_crude;
  if (name == "zz_t17") return ScalingSampler::zz_t17;
  throw ValidationError("unknown scaling sampler '" + name + "' (expected rhmc, bps, zz_crude or zz_t17)");
}

LambdaMode lambda_mode_from_string(const std::string& name) {
  if (name == "fixed") return LambdaMode::fixed;
  if (name == "optimized") return LambdaMode::optimized;
  throw ValidationError("unknown lambda_mode '" + name + "' (expected fixed or optimized)");
}

namespace {

TargetConstants family_constants(const ScalingSpec& spec, int d) {
  TargetConstants c;
  switch (spec.family) {
    case ScalingFamily::gaussian:
      c.C_P = 1.0;
      c.c2 = 1.0;
      c.c3 = 0.0;
      c.L = 1.0;
      break;
    case ScalingFamily::product_beta:
      c.C_P = spec.beta;
      c.c2 = product_beta_c2(spec.beta);
      c.c3 = 0.0;
      break;
    case ScalingFamily::radial_beta:
      c.C_P = 2.0 * spec.beta;
      c.c2 = radial_beta_c2(d, spec.beta);
      c.varpi = 1.0 - 1.0 / spec.beta;
      if (spec.beta == 1.0) c.c3 = 0.0;
      break;
  }
  return c;
}

bool is_zigzag(ScalingSampler s) { return s == ScalingSampler::zz_crude || s == ScalingSampler::zz_t17; }

}  // namespace

BoundInputs scaling_inputs(const ScalingSpec& spec, int d, double lambda) {
  if (d < 1) throw ValidationError("scaling: dimension must be >= 1");
  if (spec.beta < 1.0) throw ValidationError("scaling: beta must be >= 1");
  if (!(spec.m2 > 0.0)) throw ValidationError("scaling: m2 must be positive");
  BoundInputs in;
  in.d = d;
  in.target = family_constants(spec, d);
  const double m2 = spec.m2;
  in.velocity = is_zigzag(spec.sampler) ? VelocityMoments{m2, m2 * m2 / 3.0, m2 * m2} : VelocityMoments{m2, m2 * m2, m2 * m2};
  in.rate = spec.rate;
  in.lambda_lower = lambda;
  switch (spec.sampler) {
    case ScalingSampler::rhmc: break;
    case ScalingSampler::bps: in.a = {1.0}; break;
    case ScalingSampler::zz_crude:
    case ScalingSampler::zz_t17: in.a.assign(static_cast<std::size_t>(d), 1.0); break;
  }
  return in;
}

BoundReport scaling_bound(const ScalingSpec& spec, int d, double lambda) {
  const BoundInputs in = scaling_inputs(spec, d, lambda);
  return spec.sampler == ScalingSampler::zz_t17 ? theorem17_constants(in) : theorem1_constants(in);
}

LambdaOptimum optimize_lambda(const ScalingSpec& spec, int d) {
  const BoundInputs probe = scaling_inputs(spec, d, 1.0);
  // The Zig-Zag specialisation has no channel sum, so its bracket ignores K.
  const double K = spec.sampler == ScalingSampler::zz_t17 ? 0.0 : probe.K();
  const double growth = std::pow(static_cast<double>(d), 1.0 + probe.target.varpi);
  const double lo = std::log(1e-3);
  const double hi = std::log(1e3 * std::sqrt(1.0 + K * K * growth));
  auto f = [&](double log_lambda) { return scaling_bound(spec, d, std::exp(log_lambda)).alpha; };

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > 1e-10) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    }
  }
  LambdaOptimum best{std::exp(0.5 * (a + b)), f(0.5 * (a + b))};

  constexpr int kGrid = 1000;
  for (int i = 0; i < kGrid; ++i) {
    const double t = lo + (hi - lo) * i / (kGrid - 1);
    const double v = f(t);
    if (v > best.alpha) best = {std::exp(t), v};
  }
  return best;
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("slope fit needs at least two points");
  // y is shifted by y[0] so a constant series gives a slope of exactly zero.
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i] - y[0];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - y[0] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw ValidationError("slope fit needs at least two distinct dimensions");
  return sxy / sxx;
}

ScalingTable scaling_report(const ScalingSpec& spec, const std::vector<int>& dims, LambdaMode mode, int jobs) {
  if (dims.empty()) throw ValidationError("sweep.dims must be a non-empty list of dimensions");
  ScalingTable table;
  table.spec = spec;
  table.mode = mode;
  table.rows.resize(dims.size());
  parallel_for(dims.size(), jobs, [&](std::size_t i) {
    ScalingRow& row = table.rows[i];
    row.d = dims[i];
    if (mode == LambdaMode::optimized) {
      const LambdaOptimum opt = optimize_lambda(spec, row.d);
      row.lambda_opt = opt.lambda;
      row.alpha = opt.alpha;
    } else {
      row.lambda_opt = spec.lambda_ref;
      row.alpha = scaling_bound(spec, row.d, spec.lambda_ref).alpha;
    }
    row.alpha_inv = 1.0 / row.alpha;
  });
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    ScalingRow& row = table.rows[i];
    lx.push_back(std::log(static_cast<double>(row.d)));
    ly.push_back(std::log(row.alpha_inv));
    if (i == 0 || table.rows[i - 1].d == row.d) {
      row.slope = std::numeric_limits<double>::quiet_NaN();
    } else {
      row.slope = (ly[i] - ly[i - 1]) / (lx[i] - lx[i - 1]);
    }
  }
  table.fitted_slope = dims.size() >= 2 ? ols_slope(lx, ly) : std::numeric_limits<double>::quiet_NaN();
  return table;
}

}  // namespace pdmpkit
