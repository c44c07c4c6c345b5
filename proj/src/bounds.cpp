#include "pdmpkit/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pdmpkit/errors.hpp"

namespace pdmpkit {
namespace {

const double kSqrt2 = std::sqrt(2.0);

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

}  // namespace

const char* to_string(BoundSource source) { return source == BoundSource::theorem1 ? "theorem1" : "theorem17"; }

BoundSource bound_source_from_string(const std::string& name) {
  if (name == "theorem1") return BoundSource::theorem1;
  if (name == "theorem17") return BoundSource::theorem17;
  throw ValidationError("unknown bound source '" + name + "' (expected theorem1 or theorem17)");
}

double lambda_x(double C_P) {
  require(C_P > 0.0 && std::isfinite(C_P), "C_P must be positive");
  return C_P / (1.0 + C_P);
}

Kappas kappas(double c1, double C_P, double c2, int d, double varpi) {
  require(c1 >= 0.0 && c2 >= 0.0 && varpi >= 0.0, "kappas need non-negative c1, c2, varpi");
  require(C_P > 0.0, "kappas need C_P > 0");
  require(d >= 1, "kappas need d >= 1");
  const double kappa1 = std::sqrt(1.0 + c1 / 2.0);
  const double growth = 4.0 * c2 * std::pow(static_cast<double>(d), 1.0 + varpi);
  const double kappa2 = C_P / std::sqrt(1.0 + growth + 16.0 * C_P * C_P);
  return {kappa1, kappa2};
}

R0Result r0_general(const VelocityMoments& velocity, RateCertificate rate, std::span<const double> a,
                    double lambda_lower, double c_lambda, Kappas k) {
  require(lambda_lower > 0.0, "lambda_lower must be positive");
  double sum_a = 0.0;
  for (double ak : a) sum_a += ak;
  const auto K = static_cast<double>(a.size());
  const double ratio = k.kappa1 / k.kappa2;
  const double R0_bar = mb_factor(velocity) * (kSqrt2 * (1.0 + rate.C_phi) * ratio * sum_a + k.kappa1) +
                        lambda_lower / kSqrt2 * (1.0 + 2.0 * c_lambda * ratio) + rate.c_phi * K / kSqrt2;
  const double R0 = std::max({kR0Floor, lambda_lower / kSqrt2, R0_bar});
  return {R0_bar, R0};
}

double r0_zigzag(const VelocityMoments& velocity, double C_phi, double c_phi, double c1, double c3,
                 double lambda_lower) {
  require(lambda_lower > 0.0, "lambda_lower must be positive");
  require(c3 >= 0.0, "c3 must be non-negative");
  const double head = std::sqrt(6.0 * velocity.m4) * (2.0 + C_phi) / velocity.m2;
  return head * (std::sqrt(1.0 + c1 / 2.0) + 1.0 + std::sqrt(c3 / 2.0)) + (lambda_lower + c_phi) / kSqrt2;
}

double lambda_v_general(double lambda_lower) {
  require(lambda_lower > 0.0 && std::isfinite(lambda_lower),
          "refreshment rate lower bound must be strictly positive");
  return lambda_lower;
}

double lambda_v_zz_rademacher(std::span<const double> inf_abs_partial, std::span<const double> lambda_ref_k) {
  if (inf_abs_partial.size() != lambda_ref_k.size() || inf_abs_partial.empty()) {
    throw ValidationError("need one gradient infimum and one refreshment rate per coordinate");
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < inf_abs_partial.size(); ++k) {
    best = std::min(best, inf_abs_partial[k] / 2.0 + lambda_ref_k[k]);
  }
  require(best > 0.0,
          "microscopic coercivity is zero: some coordinate has a vanishing gradient infimum and no refreshment");
  return best;
}

double lambda_domain_end(double lambda_x, double R0) { return 4.0 * lambda_x / (4.0 * lambda_x + R0 * R0); }

double Lambda(double eps, double lambda_x, double R0) {
  const double end = lambda_domain_end(lambda_x, R0);
  if (!(eps >= 0.0) || eps > end * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "Lambda: eps = " << eps << " outside [0, " << end << "]";
    throw DomainError(msg.str());
  }
  const double a = 1.0 - eps * (1.0 - lambda_x);
  const double q = 4.0 * eps * lambda_x * (1.0 - eps) - eps * eps * R0 * R0;
  double rad = a * a - q;
  if (rad < 0.0) {
    if (rad < -1e-12) throw DomainError("Lambda: negative radicand");
    rad = 0.0;
  }
  // [a − √(a² − q)]/2 rewritten as q / (2(a + √(a² − q))).
  return q / (2.0 * (a + std::sqrt(rad)));
}

double epsilon0(double lambda_x, double R0) {
  require(lambda_x > 0.0 && lambda_x <= 1.0, "epsilon0 needs lambda_x in (0, 1]");
  require(R0 > 0.0, "epsilon0 needs R0 > 0");
  const double r2 = R0 * R0;
  return ((1.0 + lambda_x) - (1.0 - lambda_x) * std::sqrt(r2 / (r2 + 4.0 * lambda_x))) /
         ((1.0 + lambda_x) * (1.0 + lambda_x) + r2);
}

AlphaA alpha_A(double eps, const A3Constants& c) {
  require(eps > 0.0, "alpha_A needs eps > 0");
  const double s = kSqrt2 * c.lambda_v * eps;
  if (s >= 1.0) throw DomainError("alpha_A: sqrt(2)*lambda_v*eps >= 1, A is undefined");
  const double lam = Lambda(eps, c.lambda_x, c.R0);
  return {c.lambda_v * std::sqrt(c.m2) * lam / (1.0 + s), std::sqrt((1.0 + s) / (1.0 - s))};
}

Bracket lemma6_bracket(const A3Constants& c) {
  const double floor = std::max(kR0Floor, c.lambda_v / kSqrt2);
  if (c.R0 < floor) {
    std::ostringstream msg;
    msg << "alpha bracket needs R0 >= " << floor << ", got " << c.R0;
    throw PreconditionError(msg.str());
  }
  if (!(c.lambda_x > 0.0 && c.lambda_x < 1.0)) throw PreconditionError("alpha bracket needs lambda_x in (0, 1)");
  const double e0 = epsilon0(c.lambda_x, c.R0);
  const double base = c.lambda_v * c.lambda_x * std::sqrt(c.m2) * e0;
  return {base / 6.0, 4.0 * base};
}

AlphaMax maximize_alpha(const A3Constants& c) {
  const double e0 = epsilon0(c.lambda_x, c.R0);
  auto f = [&](double e) { return alpha_A(e, c).alpha; };
  const double tol = std::min(1e-12, 1e-9 * e0);
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0;
  double hi = e0;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = f(x1);
    }
  }
  AlphaMax best{0.5 * (lo + hi), f(0.5 * (lo + hi))};
  const double at_e0 = f(e0);
  if (at_e0 > best.alpha) best = {e0, at_e0};
  if (kSqrt2 * c.R0 >= c.lambda_v && best.alpha > 3.0 * at_e0 * (1.0 + 1e-12)) {
    throw Error("maximize_alpha: alpha(eps*) exceeds 3 alpha(eps0)");
  }
  return best;
}

double iact_bound(double alpha, double A) {
  require(alpha > 0.0, "iact_bound needs alpha > 0");
  require(A >= 1.0, "iact_bound needs A >= 1");
  return 2.0 * A / alpha;
}

namespace {

void validate_inputs(const BoundInputs& in) {
  in.target.validate();
  if (in.d < 1) throw ValidationError("bound inputs: d must be >= 1");
  if (!(in.velocity.m2 > 0.0 && in.velocity.m4 > 0.0 && in.velocity.m22 > 0.0)) {
    throw ValidationError("bound inputs: velocity moments must be positive");
  }
  if (!(in.lambda_lower > 0.0)) {
    throw ValidationError("lambda_ref must be > 0 for the bound (refreshment lower bound, H6)");
  }
  if (in.c_lambda < 0.0) throw ValidationError("c_lambda must be non-negative");
  if (in.rate.C_phi < 1.0 - 1e-15 || in.rate.c_phi < 0.0) throw ValidationError("rate certificate out of range");
  for (double ak : in.a) {
    if (!(ak >= 0.0)) throw ValidationError("per-channel constants a_k must be non-negative");
  }
}

void finish(BoundReport& r) {
  const A3Constants c{r.lambda_v, r.lambda_x, r.R0, r.inputs.velocity.m2};
  r.epsilon0 = epsilon0(r.lambda_x, r.R0);
  r.Lambda_at_eps0 = Lambda(r.epsilon0, r.lambda_x, r.R0);
  const AlphaA aa = alpha_A(r.epsilon0, c);
  r.alpha = aa.alpha;
  r.A = aa.A;
  r.iact_bound = iact_bound(r.alpha, r.A);
  if (r.R0 >= std::max(kR0Floor, r.lambda_v / kSqrt2) && r.lambda_x < 1.0) {
    const Bracket b = lemma6_bracket(c);
    r.lemma6_lower = b.lower;
    r.lemma6_upper = b.upper;
  }
  const AlphaMax m = maximize_alpha(c);
  r.epsilon_star = m.epsilon;
  r.alpha_star = m.alpha;
}

}  // namespace

BoundReport theorem1_constants(const BoundInputs& in) {
  validate_inputs(in);
  BoundReport r;
  r.inputs = in;
  r.source = BoundSource::theorem1;
  const Kappas k = kappas(in.target.c1, in.target.C_P, in.target.c2, in.d, in.target.varpi);
  r.kappa1 = k.kappa1;
  r.kappa2 = k.kappa2;
  const R0Result r0 = r0_general(in.velocity, in.rate, in.a, in.lambda_lower, in.c_lambda, k);
  r.R0_bar = r0.R0_bar;
  r.R0 = r0.R0;
  r.lambda_v = lambda_v_general(in.lambda_lower);
  r.lambda_x = lambda_x(in.target.C_P);
  finish(r);
  return r;
}

BoundReport theorem17_constants(const BoundInputs& in) {
  if (!in.target.c3) throw MissingC3("target.constants.c3 is required for the theorem17 bound");
  validate_inputs(in);
  BoundReport r;
  r.inputs = in;
  r.source = BoundSource::theorem17;
  r.kappa1 = std::sqrt(1.0 + in.target.c1 / 2.0);
  r.R0 = r0_zigzag(in.velocity, in.rate.C_phi, in.rate.c_phi, in.target.c1, *in.target.c3, in.lambda_lower);
  r.lambda_v = lambda_v_general(in.lambda_lower);
  r.lambda_x = lambda_x(in.target.C_P);
  finish(r);
  return r;
}

BoundReport theorem1_constants(const TargetModel& target, const VelocityModel& velocity, const RateFunction& rate,
                               const FieldDecomposition& decomp, double lambda_lower, double c_lambda) {
  if (velocity.dim() != target.dim()) throw ValidationError("velocity and target dimensions differ");
  BoundInputs in;
  in.d = target.dim();
  in.a = decomp.a;
  in.target = target.constants();
  in.velocity = velocity.moments();
  in.rate = certificate_of(rate);
  in.lambda_lower = lambda_lower;
  in.c_lambda = c_lambda;
  return theorem1_constants(in);
}

BoundReport theorem17_constants(const TargetModel& target, const VelocityModel& velocity, const RateFunction& rate,
                                double lambda_lower) {
  if (velocity.dim() != target.dim()) throw ValidationError("velocity and target dimensions differ");
  BoundInputs in;
  in.d = target.dim();
  in.a = std::vector<double>(static_cast<std::size_t>(target.dim()), 1.0);
  in.target = target.constants();
  in.velocity = velocity.moments();
  in.rate = certificate_of(rate);
  in.lambda_lower = lambda_lower;
  return theorem17_constants(in);
}

}  // namespace pdmpkit
