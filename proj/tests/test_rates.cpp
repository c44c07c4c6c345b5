#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pdmpkit/errors.hpp"
#include "pdmpkit/rates.hpp"

using namespace pdmpkit;

namespace {

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo + (hi - lo) * i / (n - 1));
  return g;
}

}  // namespace

TEST_CASE("canonical rate") {
  const auto phi = phi_canonical();
  CHECK(phi(3.0) == 3.0);
  CHECK(phi(-3.0) == 0.0);
  CHECK(phi(3.0) - phi(-3.0) == 3.0);
  CHECK(phi(0.0) == 0.0);
  CHECK(phi.C_phi == 1.0);
  CHECK(phi.c_phi == 0.0);
  CHECK(phi(7.3) + phi(-7.3) <= 0.0 + 1.0 * 7.3);
}

TEST_CASE("softplus rate") {
  const auto phi = phi_softplus(1.0);
  CHECK(phi(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(std::abs(phi(1.7) - phi(-1.7) - 1.7) < 1e-12);
  CHECK(std::abs(phi(1000.0) - 1000.0) < 1e-9);
  CHECK(std::isfinite(phi(1e6)));
  CHECK(phi(-1e6) >= 0.0);
  CHECK(phi_softplus(4.0).c_phi == doctest::Approx(std::log(2.0)));
}

TEST_CASE("H3 sweeps") {
  const auto g = grid(-100, 100, 10001);
  CHECK(verify_h3(phi_canonical(), 1.0, g).passed());
  for (double m2 : {0.25, 1.0, 4.0}) CHECK(verify_h3(phi_softplus(m2), m2, g).passed());

  RateFunction wrong = phi_softplus(1.0);
  wrong.c_phi = 0.0;
  const auto rep = verify_h3(wrong, 1.0, g);
  CHECK_FALSE(rep.passed());
  CHECK(rep.max_upper_violation == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-4));
  CHECK(std::abs(rep.worst_upper_s) < 0.05);
  CHECK_THROWS_AS(verify_h3(phi_canonical(), 1.0, std::vector<double>{}), ValidationError);
}

TEST_CASE("identity, domination and finiteness over a wide grid") {
  auto g = grid(-1000, 1000, 20001);
  g.push_back(1e6);
  g.push_back(-1e6);
  for (const auto& phi : {phi_canonical(), phi_softplus(1.0)}) {
    for (double s : g) {
      const double a = phi(s);
      const double b = phi(-s);
      CHECK(std::isfinite(a));
      CHECK(a >= 0.0);
      CHECK(a >= std::max(s, 0.0));
      if (std::abs(s) <= 1000) CHECK(std::abs(a - b - s) <= 1e-10);
    }
  }
}

TEST_CASE("rate lookup by name") {
  CHECK(rate_from_name("canonical", 1.0).family == RateFamily::canonical);
  CHECK(rate_from_name("softplus", 2.0).family == RateFamily::softplus);
  CHECK_THROWS_AS(rate_from_name("linear", 1.0), ValidationError);
}
