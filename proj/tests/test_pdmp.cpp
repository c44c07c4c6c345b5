#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "pdmpkit/diagnostics.hpp"
#include "pdmpkit/errors.hpp"
#include "pdmpkit/samplers.hpp"
#include "support/oracles.hpp"

using namespace pdmpkit;

namespace {

std::span<double> sp(Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<const double> csp(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

Eigen::MatrixXd random_spd(int d, Rng& rng) {
  Eigen::MatrixXd B(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) B(i, j) = standard_normal(rng);
  return B * B.transpose() / d + 0.5 * Eigen::MatrixXd::Identity(d, d);
}

// Bisection root of at + bt²/2 = e on [0, hi].
double numeric_root(double a, double b, double e) {
  double lo = 0.0;
  double hi = 1.0;
  auto g = [&](double t) { return a * t + 0.5 * b * t * t - e; };
  while (g(hi) < 0.0) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> inter_event_times(const EventSkeleton& sk) {
  std::vector<double> out;
  double prev = 0.0;
  for (std::size_t i = 0; i < sk.size(); ++i) {
    if (sk.kind(i) == EventKind::end) break;
    out.push_back(sk.time(i) - prev);
    prev = sk.time(i);
  }
  return out;
}

// Time-sampled column of coordinate k (0-based) raised to `power`.
std::vector<double> sampled(const EventSkeleton& sk, int k, int power, double dt) {
  const auto disc = discretize(sk, dt);
  std::vector<double> out(disc.size());
  for (std::size_t i = 0; i < disc.size(); ++i) out[i] = std::pow(disc.x(static_cast<Eigen::Index>(i), k), power);
  return out;
}

void check_moment(const std::vector<double>& series, double truth, double n_se) {
  const double m = oracle::mean_se(series).mean;
  const double se = oracle::batch_se(series);
  CAPTURE(m);
  CAPTURE(se);
  CHECK(std::abs(m - truth) <= n_se * se);
}

}  // namespace

TEST_CASE("reflect") {
  Eigen::VectorXd v(2);
  v << 1, 1;
  Eigen::VectorXd F(2);
  F << 1, 0;
  const auto r = reflect(v, F);
  CHECK(r(0) == -1.0);
  CHECK(r(1) == 1.0);
  CHECK(reflect(v, Eigen::VectorXd::Zero(2)) == v);

  Rng rng = make_stream(11);
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd a(7);
    Eigen::VectorXd f(7);
    for (int i = 0; i < 7; ++i) {
      a(i) = standard_normal(rng);
      f(i) = standard_normal(rng);
    }
    const auto b = reflect(a, f);
    CHECK(std::abs(b.norm() - a.norm()) <= 1e-12 * a.norm());
    CHECK((reflect(b, f) - a).norm() <= 1e-12 * a.norm());
  }
}

TEST_CASE("flip_coordinate") {
  Eigen::VectorXd v(3);
  v << 1, 2, 3;
  const auto w = flip_coordinate(v, 2);
  CHECK(w(0) == 1.0);
  CHECK(w(1) == -2.0);
  CHECK(w(2) == 3.0);
  CHECK(flip_coordinate(w, 2) == v);
  CHECK(w == reflect(v, Eigen::VectorXd::Unit(3, 1)));
  CHECK_THROWS_AS(flip_coordinate(v, 0), ValidationError);
  CHECK_THROWS_AS(flip_coordinate(v, 4), ValidationError);
}

TEST_CASE("refresh_full draws from the velocity law") {
  const auto model = VelocityModel::sphere_uniform(4, 2.0);
  Rng rng = make_stream(3);
  for (int i = 0; i < 100; ++i) CHECK(refresh_full(model, rng).norm() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("next_event_time") {
  SUBCASE("constant rate 2 has mean 1/2") {
    Rng rng = make_stream(5);
    const auto bound = PiecewiseLinearBound::affine(2.0, 0.0, 1e9);
    std::vector<double> draws;
    for (int i = 0; i < 100000; ++i) {
      const auto r = next_event_time([](double) { return 2.0; }, bound, rng);
      REQUIRE(r.time);
      draws.push_back(*r.time);
    }
    const auto ms = oracle::mean_se(draws);
    CHECK(std::abs(ms.mean - 0.5) <= 5.0 * ms.se);
  }
  SUBCASE("zero rate never fires") {
    Rng rng = make_stream(6);
    for (double h : {0.1, 1.0, 100.0}) {
      const auto r = next_event_time([](double) { return 0.0; }, PiecewiseLinearBound::affine(1.0, 0.0, h), rng);
      CHECK_FALSE(r.time);
    }
  }
  SUBCASE("affine inversion matches a numeric root") {
    Rng rng = make_stream(7);
    for (int i = 0; i < 1000; ++i) {
      const double e = exponential1(rng);
      CHECK(std::abs(affine_event_time(1.0, 2.0, e) - numeric_root(1.0, 2.0, e)) <= 1e-10);
      const auto s = PiecewiseLinearBound::affine(1.0, 2.0, 1e6).invert(0.0, e);
      REQUIRE(s);
      CHECK(std::abs(*s - numeric_root(1.0, 2.0, e)) <= 1e-10);
    }
  }
  SUBCASE("zig-zag micro-check") {
    // x = 2, v = +1, U = x²/2: rate (2 + t)₊, so the first candidate is √(4 + 2e) − 2.
    const double e = std::exp(1.0);
    CHECK(affine_event_time(2.0, 1.0, e) == doctest::Approx(std::sqrt(4.0 + 2.0 * e) - 2.0).epsilon(1e-14));
  }
  SUBCASE("negative affine part never fires") {
    CHECK(std::isinf(affine_event_time(-1.0, 0.0, 0.5)));
    CHECK(affine_event_time(-1.0, 1.0, 0.5) == doctest::Approx(2.0));
  }
  SUBCASE("bound violation aborts") {
    Rng rng = make_stream(8);
    CHECK_THROWS_AS(next_event_time([](double) { return 3.0; }, PiecewiseLinearBound::affine(1.0, 0.0, 10.0), rng),
                    BoundViolation);
  }
}

TEST_CASE("default_rate_bound") {
  const auto phi = phi_canonical();
  SUBCASE("isotropic gaussian from the origin is tight") {
    const auto target = gaussian_target(Eigen::MatrixXd::Identity(3, 3));
    Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
    Eigen::VectorXd v = Eigen::VectorXd::Unit(3, 0);
    const auto b = default_rate_bound(target, phi, 1.0, csp(x), csp(v), 2.0);
    for (double t : {0.0, 0.5, 1.0, 2.0}) CHECK(b(t) == doctest::Approx(t).epsilon(1e-14));
  }
  SUBCASE("zero potential") {
    const auto target = zero_target(2, Domain::euclidean);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(2);
    CHECK(default_rate_bound(target, phi, 1.0, csp(x), csp(v), 1.0)(0.7) == 0.0);
    const auto sp4 = phi_softplus(4.0);
    CHECK(default_rate_bound(target, sp4, 4.0, csp(x), csp(v), 1.0)(0.7) == doctest::Approx(sp4.c_phi * 2.0));
  }
  SUBCASE("random domination") {
    Rng rng = make_stream(21);
    const int d = 5;
    const auto target = gaussian_target(random_spd(d, rng));
    const auto& P = *target.precision();
    const auto sp1 = phi_softplus(1.0);
    int violations = 0;
    for (int rep = 0; rep < 1000; ++rep) {
      Eigen::VectorXd x(d);
      Eigen::VectorXd v(d);
      for (int i = 0; i < d; ++i) {
        x(i) = 3.0 * standard_normal(rng);
        v(i) = standard_normal(rng);
      }
      const double h = 2.0 * uniform01(rng) + 0.01;
      const double t = h * uniform01(rng);
      const Eigen::VectorXd g = P * (x + t * v);
      for (const auto* rate : {&phi, &sp1}) {
        const auto bps = default_rate_bound(target, *rate, 1.0, csp(x), csp(v), h);
        if (bps(t) < (*rate)(v.dot(g)) - 1e-12) ++violations;
        for (int k = 1; k <= d; ++k) {
          const auto zz = default_rate_bound(target, *rate, 1.0, csp(x), csp(v), h, k);
          if (zz(t) < (*rate)(v(k - 1) * g(k - 1)) - 1e-12) ++violations;
        }
      }
    }
    CHECK(violations == 0);
  }
  SUBCASE("missing Lipschitz constant") {
    const auto target = radial_beta_target(2, 2.0);
    Eigen::VectorXd x = Eigen::VectorXd::Ones(2);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(2);
    CHECK_THROWS_AS(default_rate_bound(target, phi, 1.0, csp(x), csp(v), 1.0), MissingLipschitz);
  }
}

TEST_CASE("harmonic flow") {
  SUBCASE("half period") {
    HarmonicFlow flow(Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Ones(1), 1.0);
    Eigen::VectorXd x(1);
    Eigen::VectorXd v(1);
    x << 1.0;
    v << 0.0;
    flow.advance(sp(x), sp(v), std::numbers::pi);
    CHECK(x(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(std::abs(v(0)) <= 1e-14);
  }
  SUBCASE("energy is conserved") {
    Rng rng = make_stream(4);
    const double m2 = 2.5;
    const auto target = gaussian_target(random_spd(3, rng));
    HarmonicFlow flow(*target.precision_eigenvectors(), *target.precision_eigenvalues(), m2);
    Eigen::VectorXd x(3);
    Eigen::VectorXd v(3);
    x << 0.3, -1.2, 2.0;
    v << 1.0, 0.5, -0.7;
    auto H = [&] { return m2 * 0.5 * x.dot(*target.precision() * x) + 0.5 * v.squaredNorm(); };
    const double H0 = H();
    for (int i = 0; i < 50; ++i) {
      flow.advance(sp(x), sp(v), 0.37);
      CHECK(std::abs(H() - H0) <= 1e-12 * H0);
    }
  }
  SUBCASE("leapfrog approaches the exact flow") {
    const auto target = gaussian_target(Eigen::MatrixXd::Identity(1, 1));
    LeapfrogFlow lf(target, 1.0, 1e-3);
    Eigen::VectorXd x(1);
    Eigen::VectorXd v(1);
    x << 1.0;
    v << 0.0;
    const double drift = lf.advance_tracking_energy(sp(x), sp(v), std::numbers::pi);
    CHECK(x(0) == doctest::Approx(-1.0).epsilon(1e-5));
    CHECK(std::abs(v(0)) <= 1e-5);
    CHECK(drift < 1e-6);
  }
}

TEST_CASE("sampler config validation") {
  const auto target = gaussian_target(Eigen::MatrixXd::Identity(2, 2));
  SamplerConfig ok(SamplerKind::bps, target, VelocityModel::gaussian(2, 1.0));
  CHECK_NOTHROW(ok.validate());

  auto bad = ok;
  bad.horizon = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = ok;
  bad.lambda_ref = -1.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = ok;
  bad.lambda_ref_coord = {1.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  SamplerConfig rad(SamplerKind::bps, target, VelocityModel::rademacher(2, 1.0));
  CHECK_THROWS_AS(rad.validate(), ValidationError);
  SamplerConfig dim(SamplerKind::zigzag, target, VelocityModel::rademacher(3, 1.0));
  CHECK_THROWS_AS(dim.validate(), ValidationError);
  SamplerConfig rh(SamplerKind::rhmc, target, VelocityModel::sphere_uniform(2, 1.0));
  CHECK_THROWS_AS(rh.validate(), ValidationError);
  SamplerConfig lf(SamplerKind::rhmc, radial_beta_target(2, 2.0), VelocityModel::gaussian(2, 1.0));
  lf.flow_mode = RhmcFlowMode::leapfrog;
  CHECK_THROWS_AS(lf.validate(), MissingLipschitz);
}

TEST_CASE("skeletons are structurally valid and replayable") {
  const auto target = gaussian_target(Eigen::Vector3d(1.0, 4.0, 9.0).asDiagonal());
  for (auto kind : {SamplerKind::zigzag, SamplerKind::bps, SamplerKind::rhmc}) {
    CAPTURE(to_string(kind));
    const auto vel = kind == SamplerKind::zigzag ? VelocityModel::rademacher(3, 1.0) : VelocityModel::gaussian(3, 1.0);
    SamplerConfig cfg(kind, target, vel);
    cfg.horizon = 200.0;
    cfg.seed = 99;
    const auto a = simulate(cfg);
    const auto check = validate_skeleton(a.skeleton);
    CAPTURE(check.first_failure);
    CHECK(check.ok);
    CHECK(a.skeleton.horizon() == doctest::Approx(200.0));
    const auto b = simulate(cfg);
    REQUIRE(a.skeleton.size() == b.skeleton.size());
    bool same = true;
    for (std::size_t i = 0; i < a.skeleton.size(); ++i) {
      same = same && a.skeleton.time(i) == b.skeleton.time(i) && a.skeleton.kind(i) == b.skeleton.kind(i);
      for (int j = 0; j < 3; ++j) same = same && a.skeleton.v_after(i)[j] == b.skeleton.v_after(i)[j];
    }
    CHECK(same);
  }
}

TEST_CASE("sphere velocities stay on the sphere under bounces") {
  const auto target = gaussian_target(Eigen::MatrixXd::Identity(4, 4));
  SamplerConfig cfg(SamplerKind::bps, target, VelocityModel::sphere_uniform(4, 2.0));
  cfg.horizon = 500.0;
  cfg.seed = 17;
  const auto sk = simulate(cfg).skeleton;
  double worst = 0.0;
  for (std::size_t i = 0; i < sk.size(); ++i) {
    double n2 = 0.0;
    for (double c : sk.v_after(i)) n2 += c * c;
    worst = std::max(worst, std::abs(std::sqrt(n2) - 2.0));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("zero potential on the torus") {
  SUBCASE("zig-zag refresh times are exponential") {
    SamplerConfig cfg(SamplerKind::zigzag, zero_target(2, Domain::torus), VelocityModel::rademacher(2, 1.0));
    cfg.horizon = 1e4;
    cfg.seed = 2;
    const auto sk = simulate(cfg).skeleton;
    const auto c = sk.counts();
    CHECK(c[static_cast<int>(EventKind::bounce)] == 0);
    const double n = static_cast<double>(c[static_cast<int>(EventKind::refresh_full)]);
    CHECK(std::abs(n - 1e4) <= 5.0 * 100.0);
    const auto gof = oracle::chi2_exponential(inter_event_times(sk), 1.0);
    CAPTURE(gof.statistic);
    CHECK(gof.p_value > 0.01);
  }
  SUBCASE("refresh rate carries the square root of m2") {
    SamplerConfig cfg(SamplerKind::bps, zero_target(2, Domain::torus), VelocityModel::gaussian(2, 4.0));
    cfg.horizon = 5e3;
    cfg.lambda_ref = 1.5;
    cfg.seed = 12;
    const auto gof = oracle::chi2_exponential(inter_event_times(simulate(cfg).skeleton), 3.0);
    CHECK(gof.p_value > 0.01);
  }
  SUBCASE("bps positions at refresh times are uniform") {
    SamplerConfig cfg(SamplerKind::bps, zero_target(2, Domain::torus), VelocityModel::sphere_uniform(2, 1.0));
    cfg.horizon = 1e4;
    cfg.seed = 31;
    const auto sk = simulate(cfg).skeleton;
    for (int k = 0; k < 2; ++k) {
      std::vector<double> xs;
      for (std::size_t i = 0; i < sk.size() && xs.size() < 10000; ++i) {
        if (sk.kind(i) == EventKind::refresh_full) xs.push_back(sk.x(i)[k]);
      }
      double stat = 0.0;
      CHECK(oracle::ks_one_sample_pass(xs, [](double u) { return std::clamp(u, 0.0, 1.0); }, 0.01, &stat));
    }
  }
}

TEST_CASE("stationarity on gaussian targets") {
  SUBCASE("zig-zag, d = 1") {
    SamplerConfig cfg(SamplerKind::zigzag, gaussian_target(Eigen::MatrixXd::Identity(1, 1)),
                      VelocityModel::rademacher(1, 1.0));
    cfg.horizon = 1e5;
    cfg.seed = 1;
    const auto sk = simulate(cfg).skeleton;
    check_moment(sampled(sk, 0, 1, 0.5), 0.0, 3.0);
    check_moment(sampled(sk, 0, 2, 0.5), 1.0, 3.0);
  }
  SUBCASE("bps, d = 10") {
    SamplerConfig cfg(SamplerKind::bps, gaussian_target(Eigen::MatrixXd::Identity(10, 10)),
                      VelocityModel::gaussian(10, 1.0));
    cfg.horizon = 1e5;
    cfg.seed = 2;
    const auto sk = simulate(cfg).skeleton;
    for (int k = 0; k < 10; ++k) {
      CAPTURE(k);
      check_moment(sampled(sk, k, 2, 0.5), 1.0, 3.0);
    }
  }
  SUBCASE("rhmc, d = 3") {
    SamplerConfig cfg(SamplerKind::rhmc, gaussian_target(Eigen::MatrixXd::Identity(3, 3)),
                      VelocityModel::gaussian(3, 1.0));
    cfg.horizon = 1e5;
    cfg.seed = 3;
    const auto sk = simulate(cfg).skeleton;
    for (int k = 0; k < 3; ++k) {
      CAPTURE(k);
      check_moment(sampled(sk, k, 2, 0.5), 1.0, 3.0);
    }
  }
}

TEST_CASE("m2 rescaling is a time change") {
  // A run at m2 = 4 is the m2 = 1 process sped up by a factor 2.
  const auto target = gaussian_target(Eigen::MatrixXd::Identity(2, 2));
  auto run = [&](double m2, double T, std::uint64_t seed) {
    SamplerConfig cfg(SamplerKind::bps, target, VelocityModel::gaussian(2, m2));
    cfg.horizon = T;
    cfg.seed = seed;
    return simulate(cfg).skeleton;
  };
  const auto slow = run(1.0, 2e4, 40);
  const auto fast = run(4.0, 1e4, 41);
  const double n_slow = static_cast<double>(slow.size() - 1);
  const double n_fast = static_cast<double>(fast.size() - 1);
  // Counts over matched process time; the event process is overdispersed
  // relative to Poisson only mildly, so allow 5 Poisson standard errors.
  CHECK(std::abs(n_fast - n_slow) <= 5.0 * std::sqrt(n_slow + n_fast));
  check_moment(sampled(fast, 0, 2, 0.25), 1.0, 4.0);
  check_moment(sampled(slow, 0, 2, 0.5), 1.0, 4.0);
}
