#pragma once

#include <span>
#include <string>

namespace pdmpkit {

enum class RateFamily { canonical, softplus };

/// Event intensity φ with φ(s) − φ(−s) = s and the certificate
/// |s| ≤ φ(s) + φ(−s) ≤ c_phi·√m2 + C_phi·|s|.
///
/// c_phi is issued for a specific m2 (softplus); canonical has c_phi = 0.
struct RateFunction {
  RateFamily family = RateFamily::canonical;
  double C_phi = 1.0;
  double c_phi = 0.0;
  double m2 = 1.0;  // second velocity moment the certificate was issued for

  double operator()(double s) const;
  std::string name() const;
};

RateFunction phi_canonical();
RateFunction phi_softplus(double m2);
RateFunction rate_from_name(const std::string& name, double m2);

struct H3Report {
  std::size_t points = 0;
  double max_identity_violation = 0.0;  // |φ(s) − φ(−s) − s|
  double max_lower_violation = 0.0;     // (|s| − φ(s) − φ(−s))₊
  double max_upper_violation = 0.0;     // (φ(s) + φ(−s) − c_phi√m2 − C_phi|s|)₊
  double worst_upper_s = 0.0;
  bool passed() const;
};

/// Sweeps the three H3 conditions over `grid`. Report-only.
H3Report verify_h3(const RateFunction& rate, double m2, std::span<const double> grid);

}  // namespace pdmpkit
