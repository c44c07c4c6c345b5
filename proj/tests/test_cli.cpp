#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <string>

#include "pdmpkit/config.hpp"
#include "pdmpkit/errors.hpp"
#include "pdmpkit/io.hpp"
#include "pdmpkit/verify.hpp"

using namespace pdmpkit;
using nlohmann::json;

namespace {

json base() {
  return json::parse(R"({
    "sampler": "bps",
    "target": {"kind": "gaussian", "d": 2},
    "velocity": {"kind": "gaussian", "m2": 1.0},
    "rate": "canonical",
    "lambda_ref": 1.0,
    "horizon": 100,
    "seed": 3
  })");
}

std::string error_of(const json& j) {
  try {
    const auto cfg = parse_config(j);
    compute_bound(cfg);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse_config(base());
  CHECK(cfg.sampler == SamplerKind::bps);
  CHECK(cfg.target.d == 2);
  CHECK(cfg.horizon == 100.0);
  CHECK(cfg.seed == 3);
  CHECK(cfg.replicas == 1);
  CHECK(cfg.diagnostics.dt == 0.5);

  auto j = base();
  j["target"]["precision"] = {2.0, 0.5, 0.5, 1.0};
  const auto sc = build_sampler_config(parse_config(j));
  REQUIRE(sc.target.precision());
  CHECK((*sc.target.precision())(0, 1) == 0.5);
  CHECK(sc.horizon == 100.0);

  j = base();
  j["target"]["constants"] = {{"C_P", 0.25}};
  CHECK(build_target(parse_config(j).target).constants().C_P == 0.25);
}

TEST_CASE("config errors name the field") {
  auto j = base();
  j["target"]["foo"] = 1;
  CHECK(contains(error_of(j), "config.target.foo"));

  j = base();
  j["extra"] = true;
  CHECK(contains(error_of(j), "config.extra"));

  j = base();
  j["sampler"] = "hmc";
  CHECK(contains(error_of(j), "config.sampler"));

  j = base();
  j["target"]["d"] = 0;
  CHECK(contains(error_of(j), "config.target.d"));

  j = base();
  j["target"]["precision"] = {1.0, 2.0, 2.0, 1.0};
  CHECK_FALSE(error_of(j).empty());

  j = base();
  j["lambda_ref"] = 0.0;
  const auto h6 = error_of(j);
  CHECK(contains(h6, "config.lambda_ref"));
  CHECK(contains(h6, "H6"));

  j = base();
  j["sampler"] = "zigzag";
  j["velocity"]["kind"] = "rademacher";
  j["target"] = {{"kind", "radial_beta"}, {"d", 2}, {"beta", 2.0}};
  j["bound_source"] = "theorem17";
  CHECK(contains(error_of(j), "config.target.constants.c3"));

  j = base();
  j["bound_source"] = "theorem17";
  CHECK(contains(error_of(j), "zigzag"));

  j = base();
  j["horizon"] = "long";
  CHECK(contains(error_of(j), "config.horizon"));
}

TEST_CASE("bound pipeline from a config") {
  const auto r = compute_bound(parse_config(base()));
  CHECK(r.alpha > 0.0);
  REQUIRE(r.lemma6_lower);
  CHECK(*r.lemma6_lower <= r.alpha);
  CHECK(r.alpha <= *r.lemma6_upper);
  const auto j = to_json(r);
  for (const char* key : {"kappa1", "kappa2", "R0_bar", "R0", "lambda_x", "lambda_v", "epsilon0", "alpha", "A",
                          "iact_bound", "lemma6_lower", "lemma6_upper"}) {
    CAPTURE(key);
    CHECK(j.contains(key));
  }
  CHECK(j["alpha"].get<double>() == r.alpha);
}

TEST_CASE("hashing and stamping") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  const auto h = config_hash(base());
  CHECK(h.size() == 16);
  CHECK(config_hash(json::parse(base().dump(2))) == h);
  auto other = base();
  other["seed"] = 4;
  CHECK(config_hash(other) != h);
  const auto doc = stamp(json::object(), h);
  CHECK(doc["config_hash"] == h);
  CHECK(doc["toolkit_version"] == toolkit_version());
}

TEST_CASE("number formatting round-trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5}) CHECK(std::stod(format_double(x)) == x);
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("skeleton csv") {
  const auto cfg = parse_config(base());
  const auto res = simulate(build_sampler_config(cfg));
  std::ostringstream a;
  std::ostringstream b;
  write_skeleton_csv(a, res.skeleton, "00ff");
  write_skeleton_csv(b, simulate(build_sampler_config(cfg)).skeleton, "00ff");
  CHECK(a.str() == b.str());

  std::istringstream in(a.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# pdmpkit", 0) == 0);
  std::getline(in, line);
  CHECK(line == "# config_hash 00ff");
  std::getline(in, line);
  CHECK(line == "t,kind,k,x1,x2,v1,v2");
  std::getline(in, line);
  CHECK(line.rfind("0,start,0,", 0) == 0);
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == res.skeleton.size());
}

TEST_CASE("scaling csv") {
  ScalingSpec spec;
  const auto table = scaling_report(spec, {2, 4}, LambdaMode::fixed);
  std::ostringstream out;
  write_scaling_csv(out, table, "ab");
  CHECK(contains(out.str(), "d,lambda_opt,alpha,alpha_inv,slope\n"));
  CHECK(contains(out.str(), "\n2,1,"));
  CHECK(to_json(table)["rows"].size() == 2);
}

TEST_CASE("verify suites") {
  CHECK(suite_names().size() >= 4);
  for (const char* name : {"moments", "h3", "brackets", "thinning"}) {
    CAPTURE(name);
    const auto report = run_suite(name, 1);
    CHECK(report.passed());
    CHECK_FALSE(report.checks.empty());
  }
  try {
    run_suite("nope");
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(contains(e.what(), "moments"));
    CHECK(contains(e.what(), "brackets"));
  }
}
