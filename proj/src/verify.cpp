#include "pdmpkit/verify.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "pdmpkit/bounds.hpp"
#include "pdmpkit/errors.hpp"
#include "pdmpkit/rates.hpp"
#include "pdmpkit/samplers.hpp"
#include "pdmpkit/simd.hpp"
#include "pdmpkit/targets.hpp"
#include "pdmpkit/thinning.hpp"
#include "pdmpkit/velocity.hpp"

namespace pdmpkit {

bool SuiteReport::passed() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return !checks.empty();
}

namespace {

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

/// |estimate − truth| in units of the standard error.
struct Zscore {
  double z = 0.0;
  bool within(double k) const { return std::abs(z) <= k; }
};

SuiteReport moments_suite(std::uint64_t seed) {
  SuiteReport rep{"moments", {}};
  const int n = 200000;
  for (int d : {2, 3, 10}) {
    const std::vector<VelocityModel> models{VelocityModel::gaussian(d, 1.0), VelocityModel::sphere_uniform(d),
                                            VelocityModel::rademacher(d, 1.0),
                                            VelocityModel::spherically_symmetric(d, 2.0, 5.0)};
    for (const auto& m : models) {
      Rng rng = make_stream(seed, static_cast<std::uint64_t>(d));
      std::vector<double> v(static_cast<std::size_t>(d));
      std::vector<double> a(n);
      std::vector<double> b(n);
      for (int i = 0; i < n; ++i) {
        m.sample(rng, v);
        a[static_cast<std::size_t>(i)] = v[0];
        b[static_cast<std::size_t>(i)] = v[1];
      }
      // The power sums give the means; a second pass gives the variances.
      const simd::PowerSums ps = simd::power_sums(a, b);
      const double e2 = ps.s2 / n;
      const double e4 = ps.s4 / n / 3.0;
      const double e22 = ps.s22 / n;
      double v2 = 0.0;
      double v4 = 0.0;
      double v22 = 0.0;
      for (int i = 0; i < n; ++i) {
        const double x2 = a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(i)];
        const double y2 = b[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
        v2 += (x2 - e2) * (x2 - e2);
        v4 += (x2 * x2 / 3.0 - e4) * (x2 * x2 / 3.0 - e4);
        v22 += (x2 * y2 - e22) * (x2 * y2 - e22);
      }
      const VelocityMoments mo = m.moments();
      auto z = [&](double est, double var, double truth) {
        const double se = std::sqrt(var / n / (n - 1.0));
        return se > 0.0 ? (est - truth) / se : (est == truth ? 0.0 : INFINITY);
      };
      const double z2 = z(e2, v2, mo.m2);
      const double z4 = z(e4, v4, mo.m4);
      const double z22 = z(e22, v22, mo.m22);
      const bool ok = std::abs(z2) <= 5.0 && std::abs(z4) <= 5.0 && std::abs(z22) <= 5.0;
      rep.checks.push_back({std::string(to_string(m.kind())) + " d=" + std::to_string(d), ok,
                            "z(m2)=" + fmt(z2) + " z(m4)=" + fmt(z4) + " z(m22)=" + fmt(z22)});
    }
  }
  return rep;
}

SuiteReport h3_suite() {
  SuiteReport rep{"h3", {}};
  std::vector<double> grid;
  for (int i = 0; i <= 20000; ++i) grid.push_back(-1000.0 + 0.1 * i);
  grid.push_back(1e6);
  grid.push_back(-1e6);
  for (double m2 : {0.25, 1.0, 4.0}) {
    for (const RateFunction& r : {phi_canonical(), phi_softplus(m2)}) {
      const H3Report h = verify_h3(r, m2, grid);
      rep.checks.push_back({r.name() + " m2=" + fmt(m2), h.passed(),
                            "identity=" + fmt(h.max_identity_violation) + " lower=" + fmt(h.max_lower_violation) +
                                " upper=" + fmt(h.max_upper_violation)});
    }
  }
  return rep;
}

SuiteReport brackets_suite(std::uint64_t seed) {
  SuiteReport rep{"brackets", {}};
  Rng rng = make_stream(seed, 7);
  int bad27 = 0;
  int badA = 0;
  int bad6 = 0;
  int bad25 = 0;
  const int n = 500;
  for (int i = 0; i < n; ++i) {
    const double lx = 0.01 + 0.98 * uniform01(rng);
    const double R0 = std::exp(std::log(kR0Floor) + (std::log(1e3) - std::log(kR0Floor)) * uniform01(rng));
    const double lv = std::sqrt(2.0) * R0 * (0.001 + 0.999 * uniform01(rng));
    const double m2 = std::array<double, 3>{0.25, 1.0, 4.0}[i % 3];
    const A3Constants c{lv, lx, R0, m2};
    const double e0 = epsilon0(lx, R0);
    if (!(lx / (1.0 + R0 * R0) <= e0 && e0 <= 2.0 / (4.0 + R0 * R0))) ++bad27;
    const AlphaA aa = alpha_A(e0, c);
    if (aa.A > std::sqrt(3.0) * (1.0 + 1e-12)) ++badA;
    const Bracket b = lemma6_bracket(c);
    if (!(b.lower <= aa.alpha && aa.alpha <= b.upper)) ++bad6;
    const AlphaMax am = maximize_alpha(c);
    if (!(aa.alpha <= am.alpha && am.alpha <= 3.0 * aa.alpha)) ++bad25;
  }
  rep.checks.push_back({"epsilon0 bracket", bad27 == 0, std::to_string(bad27) + " of " + std::to_string(n)});
  rep.checks.push_back({"A(eps0) <= sqrt(3)", badA == 0, std::to_string(badA) + " of " + std::to_string(n)});
  rep.checks.push_back({"alpha(eps0) bracket", bad6 == 0, std::to_string(bad6) + " of " + std::to_string(n)});
  rep.checks.push_back({"alpha(eps*) sandwich", bad25 == 0, std::to_string(bad25) + " of " + std::to_string(n)});
  return rep;
}

SuiteReport thinning_suite(std::uint64_t seed) {
  SuiteReport rep{"thinning", {}};
  // Closed-form inversion against bisection.
  {
    double worst = 0.0;
    for (double e : {0.01, 0.5, 1.0, 3.0, 10.0}) {
      const double t = affine_event_time(1.0, 2.0, e);
      double lo = 0.0;
      double hi = 100.0;
      for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (mid + mid * mid < e ? lo : hi) = mid;
      }
      worst = std::max(worst, std::abs(t - 0.5 * (lo + hi)));
    }
    rep.checks.push_back({"affine inversion", worst <= 1e-10, "max error " + fmt(worst)});
  }
  // Constant rate 2 thinned against the constant bound 2.
  {
    Rng rng = make_stream(seed, 11);
    const auto bound = PiecewiseLinearBound::affine(2.0, 0.0, 1e9);
    const int n = 100000;
    double s = 0.0;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t = *next_event_time([](double) { return 2.0; }, bound, rng).time;
      s += t;
      ss += t * t;
    }
    const double mean = s / n;
    const double se = std::sqrt((ss / n - mean * mean) / n);
    const double z = (mean - 0.5) / se;
    rep.checks.push_back({"constant-rate mean", std::abs(z) <= 5.0, "mean=" + fmt(mean) + " z=" + fmt(z)});
  }
  // A violated envelope must abort.
  {
    Rng rng = make_stream(seed, 12);
    bool raised = false;
    try {
      next_event_time([](double) { return 3.0; }, PiecewiseLinearBound::affine(1.0, 0.0, 100.0), rng);
    } catch (const BoundViolation&) {
      raised = true;
    }
    rep.checks.push_back({"bound violation raised", raised, raised ? "raised" : "not raised"});
  }
  // First-event times of the 1-d Gaussian Zig-Zag: thinning vs inversion means.
  {
    const TargetModel g = gaussian_target(Eigen::MatrixXd::Identity(1, 1));
    const int n = 4000;
    std::array<double, 2> mean{};
    std::array<double, 2> var{};
    for (int mode = 0; mode < 2; ++mode) {
      double s = 0.0;
      double ss = 0.0;
      for (int i = 0; i < n; ++i) {
        SamplerConfig cfg(SamplerKind::zigzag, g, VelocityModel::rademacher(1, 1.0));
        cfg.lambda_ref = 0.0;
        cfg.horizon = 1e6;
        cfg.max_events = 1;
        cfg.seed = seed + 1000 * static_cast<std::uint64_t>(mode);
        cfg.replica = static_cast<std::uint64_t>(i);
        cfg.thinning.force = mode == 1;
        const auto r = simulate(cfg);
        const double t = r.skeleton.time(0);
        s += t;
        ss += t * t;
      }
      mean[static_cast<std::size_t>(mode)] = s / n;
      var[static_cast<std::size_t>(mode)] = ss / n - (s / n) * (s / n);
    }
    const double z = (mean[0] - mean[1]) / std::sqrt((var[0] + var[1]) / n);
    rep.checks.push_back({"zigzag thinning vs inversion", std::abs(z) <= 5.0,
                          "means " + fmt(mean[0]) + " / " + fmt(mean[1]) + " z=" + fmt(z)});
  }
  return rep;
}

SuiteReport certificates_suite(std::uint64_t seed) {
  SuiteReport rep{"certificates", {}};
  auto run = [&](const TargetModel& t, const std::string& label) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(t.dim()));
    const CertificateReport c = verify_certificate(t, 10000, rng);
    rep.checks.push_back({label, c.passed(),
                          "H1 violations " + std::to_string(c.h1_violations) + ", growth violations " +
                              std::to_string(c.eq9_violations)});
  };
  for (int d = 1; d <= 5; ++d) {
    for (double beta : {1.0, 2.0, 3.0}) run(product_beta_target(d, beta), "product_beta d=" + std::to_string(d) + " beta=" + fmt(beta));
    for (double beta : {1.0, 2.0}) run(radial_beta_target(d, beta), "radial_beta d=" + std::to_string(d) + " beta=" + fmt(beta));
  }
  Eigen::MatrixXd P(3, 3);
  P << 2.0, 0.5, 0.0, 0.5, 1.0, 0.2, 0.0, 0.2, 3.0;
  run(gaussian_target(P), "gaussian d=3");
  return rep;
}

SuiteReport h2_suite(std::uint64_t seed) {
  SuiteReport rep{"h2", {}};
  const std::vector<std::pair<std::string, TargetModel>> targets{
      {"gaussian", gaussian_target(Eigen::MatrixXd::Identity(3, 3))},
      {"product_beta", product_beta_target(3, 2.0)},
      {"radial_beta", radial_beta_target(3, 2.0)}};
  for (const auto& [name, t] : targets) {
    for (const FieldDecomposition& dec : {decompose_zigzag(t), decompose_bps(t), decompose_rhmc(t)}) {
      Rng rng = make_stream(seed, static_cast<std::uint64_t>(dec.K));
      const H2Report h = verify_h2(dec, t, 100, rng);
      rep.checks.push_back({name + " K=" + std::to_string(dec.K), h.passed(),
                            "sum " + fmt(h.max_sum_violation) + ", bound violations " +
                                std::to_string(h.bound_violations)});
    }
  }
  return rep;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"moments", "h3", "brackets", "thinning", "certificates", "h2"};
  return names;
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "moments") return moments_suite(seed);
  if (name == "h3") return h3_suite();
  if (name == "brackets") return brackets_suite(seed);
  if (name == "thinning") return thinning_suite(seed);
  if (name == "certificates") return certificates_suite(seed);
  if (name == "h2") return h2_suite(seed);
  std::string list;
  for (const auto& n : suite_names()) list += (list.empty() ? "" : ", ") + n;
  throw ValidationError("unknown suite '" + name + "' (available: " + list + ")");
}

nlohmann::json to_json(const SuiteReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return {{"suite", r.suite}, {"pass", r.passed()}, {"checks", checks}};
}

}  // namespace pdmpkit
