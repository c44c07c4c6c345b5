#include "pdmpkit/rates.hpp"

#include <algorithm>
#include <cmath>

#include "pdmpkit/errors.hpp"

namespace pdmpkit {
namespace {

double softplus(double s) {
  if (s > 30.0) return s + std::exp(-s);
  return std::log1p(std::exp(s));
}

}  // namespace

double RateFunction::operator()(double s) const {
  switch (family) {
    case RateFamily::canonical: return s > 0.0 ? s : 0.0;
    case RateFamily::softplus: return softplus(s);
  }
  return 0.0;
}

std::string RateFunction::name() const { return family == RateFamily::canonical ? "canonical" : "softplus"; }

RateFunction phi_canonical() { return {RateFamily::canonical, 1.0, 0.0, 1.0}; }

RateFunction phi_softplus(double m2) {
  if (!(m2 > 0.0) || !std::isfinite(m2)) throw ValidationError("softplus certificate needs m2 > 0");
  // log(1 + e^s) ≤ log 2 + (s)₊, so φ(s) + φ(−s) ≤ 2·log 2 + |s|.
  return {RateFamily::softplus, 1.0, 2.0 * std::log(2.0) / std::sqrt(m2), m2};
}

RateFunction rate_from_name(const std::string& name, double m2) {
  if (name == "canonical") return phi_canonical();
  if (name == "softplus") return phi_softplus(m2);
  throw ValidationError("unknown rate family '" + name + "' (expected canonical or softplus)");
}

bool H3Report::passed() const {
  return max_identity_violation == 0.0 && max_lower_violation == 0.0 && max_upper_violation == 0.0;
}

H3Report verify_h3(const RateFunction& rate, double m2, std::span<const double> grid) {
  if (grid.empty()) throw ValidationError("verify_h3 needs a non-empty grid");
  H3Report r;
  r.points = grid.size();
  const double additive = rate.c_phi * std::sqrt(m2);
  for (double s : grid) {
    const double fp = rate(s);
    const double fm = rate(-s);
    const double tol = 1e-12 * std::max(1.0, std::abs(s));
    const double ident = std::abs(fp - fm - s);
    if (ident > tol) r.max_identity_violation = std::max(r.max_identity_violation, ident);
    const double lower = std::abs(s) - (fp + fm);
    if (lower > tol) r.max_lower_violation = std::max(r.max_lower_violation, lower);
    const double upper = (fp + fm) - (additive + rate.C_phi * std::abs(s));
    if (upper > tol && upper > r.max_upper_violation) {
      r.max_upper_violation = upper;
      r.worst_upper_s = s;
    }
  }
  return r;
}

}  // namespace pdmpkit
