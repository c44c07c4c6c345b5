#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdmpkit/rates.hpp"
#include "pdmpkit/targets.hpp"
#include "pdmpkit/velocity.hpp"

namespace pdmpkit {

/// 4 + 2√3, the smallest admissible R₀ in the general bound.
inline constexpr double kR0Floor = 7.4641016151377545870548926830117;

struct RateCertificate {
  double C_phi = 1.0;
  double c_phi = 0.0;
};

inline RateCertificate certificate_of(const RateFunction& r) { return {r.C_phi, r.c_phi}; }

/// Constants of the abstract hypocoercivity estimate.
struct A3Constants {
  double lambda_v = 1.0;  // microscopic coercivity
  double lambda_x = 0.5;  // macroscopic coercivity, in (0, 1)
  double R0 = kR0Floor;   // boundedness constant
  double m2 = 1.0;
};

enum class BoundSource { theorem1, theorem17 };

const char* to_string(BoundSource source);
BoundSource bound_source_from_string(const std::string& name);

/// Everything the constant calculators consume, as plain numbers.
struct BoundInputs {
  int d = 1;
  std::vector<double> a;  // per-channel constants; K = a.size()
  TargetConstants target;
  VelocityMoments velocity;
  RateCertificate rate;
  double lambda_lower = 1.0;
  double c_lambda = 0.0;

  int K() const { return static_cast<int>(a.size()); }
};

struct BoundReport {
  BoundInputs inputs;
  BoundSource source = BoundSource::theorem1;
  double kappa1 = 0.0;
  std::optional<double> kappa2;  // general bound only
  std::optional<double> R0_bar;  // general bound only
  double R0 = 0.0;
  double lambda_v = 0.0;
  double lambda_x = 0.0;
  double epsilon0 = 0.0;
  double Lambda_at_eps0 = 0.0;
  double alpha = 0.0;
  double A = 0.0;
  double iact_bound = 0.0;
  std::optional<double> lemma6_lower;  // present when R₀ ≥ (4 + 2√3) ∨ λ_v/√2
  std::optional<double> lemma6_upper;
  double epsilon_star = 0.0;
  double alpha_star = 0.0;
};

struct Kappas {
  double kappa1 = 1.0;
  double kappa2 = 1.0;
};

struct R0Result {
  double R0_bar = 0.0;
  double R0 = 0.0;
};

struct AlphaA {
  double alpha = 0.0;
  double A = 1.0;
};

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
};

struct AlphaMax {
  double epsilon = 0.0;
  double alpha = 0.0;
};

double lambda_x(double C_P);
Kappas kappas(double c1, double C_P, double c2, int d, double varpi);

R0Result r0_general(const VelocityMoments& velocity, RateCertificate rate, std::span<const double> a,
                    double lambda_lower, double c_lambda, Kappas k);
double r0_zigzag(const VelocityMoments& velocity, double C_phi, double c_phi, double c1, double c3,
                 double lambda_lower);

double lambda_v_general(double lambda_lower);
/// min_k { inf|∂_kU|/2 + inf λ_ref,k }, from caller-supplied infima.
double lambda_v_zz_rademacher(std::span<const double> inf_abs_partial, std::span<const double> lambda_ref_k);

/// Upper end of the ε interval on which Λ ≥ 0: 4λx/(4λx + R₀²).
double lambda_domain_end(double lambda_x, double R0);
double Lambda(double eps, double lambda_x, double R0);
double epsilon0(double lambda_x, double R0);
AlphaA alpha_A(double eps, const A3Constants& c);
Bracket lemma6_bracket(const A3Constants& c);
/// Golden-section maximisation of α over (0, ε₀].
AlphaMax maximize_alpha(const A3Constants& c);
double iact_bound(double alpha, double A);

BoundReport theorem1_constants(const BoundInputs& in);
BoundReport theorem17_constants(const BoundInputs& in);

/// Model-level entry points.
BoundReport theorem1_constants(const TargetModel& target, const VelocityModel& velocity, const RateFunction& rate,
                               const FieldDecomposition& decomp, double lambda_lower, double c_lambda = 0.0);
BoundReport theorem17_constants(const TargetModel& target, const VelocityModel& velocity, const RateFunction& rate,
                                double lambda_lower);

}  // namespace pdmpkit
