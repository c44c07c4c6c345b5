#include "pdmpkit/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "pdmpkit/errors.hpp"

namespace pdmpkit {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

/// Read-once view of a JSON object; keys not consumed by the parser are
/// reported by finish().
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  const std::string& path() const { return path_; }
  std::string at(const std::string& key) const { return path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& key, double fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number()) fail(at(key), "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) fail(at(key), "must be finite");
    return x;
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) {
      seen_.insert(key);
      return std::nullopt;
    }
    return number(key, 0.0);
  }

  long long integer(const std::string& key, long long fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) fail(at(key), "expected an integer");
    return v->get<long long>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
      fail(at(key), "expected a non-negative integer");
    }
    return v->get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(at(key), "expected true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_string()) fail(at(key), "expected a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json* v = get(key);
    if (!v) return {};
    if (!v->is_array()) fail(at(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& e = (*v)[i];
      if (!e.is_number()) fail(at(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(e.get<double>());
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(at(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

/// Converts enum parse errors into path-qualified validation errors.
template <class F>
auto named(const std::string& path, F&& parse) -> decltype(parse()) {
  try {
    return parse();
  } catch (const ValidationError& e) {
    fail(path, e.what());
  }
}

TargetSpec parse_target(const json& j, const std::string& path) {
  Obj o(j, path);
  TargetSpec t;
  t.kind = o.string("kind", t.kind);
  static const std::set<std::string> kinds{"gaussian", "zero", "product_beta", "radial_beta"};
  if (!kinds.count(t.kind)) fail(o.at("kind"), "unknown target '" + t.kind + "' (gaussian, zero, product_beta, radial_beta)");
  const std::string domain = o.string("domain", t.kind == "zero" ? "torus" : "euclidean");
  if (domain == "euclidean") {
    t.domain = Domain::euclidean;
  } else if (domain == "torus") {
    t.domain = Domain::torus;
  } else {
    fail(o.at("domain"), "expected euclidean or torus");
  }
  if (t.domain == Domain::torus && t.kind != "zero") fail(o.at("domain"), "only the zero target lives on the torus");
  t.precision = o.numbers("precision");
  t.diagonal = o.numbers("diagonal");
  const long long d = o.integer("d", 0);
  if (!t.precision.empty() && !t.diagonal.empty()) fail(path, "give either precision or diagonal, not both");
  if (!t.precision.empty()) {
    const auto n = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(t.precision.size()))));
    if (n * n != static_cast<long long>(t.precision.size())) fail(o.at("precision"), "expected d*d entries (row-major)");
    if (d != 0 && d != n) fail(o.at("d"), "does not match the precision matrix size");
    t.d = static_cast<int>(n);
  } else if (!t.diagonal.empty()) {
    if (d != 0 && d != static_cast<long long>(t.diagonal.size())) fail(o.at("d"), "does not match the diagonal length");
    t.d = static_cast<int>(t.diagonal.size());
  } else {
    if (d < 1) fail(o.at("d"), "must be a positive integer");
    t.d = static_cast<int>(d);
  }
  if ((!t.precision.empty() || !t.diagonal.empty()) && t.kind != "gaussian") {
    fail(path, "precision/diagonal apply to the gaussian target only");
  }
  t.beta = o.number("beta", 1.0);
  if ((t.kind == "product_beta" || t.kind == "radial_beta") && t.beta < 1.0) fail(o.at("beta"), "must be >= 1");
  if (o.has("constants")) {
    Obj c(*o.get("constants"), o.at("constants"));
    t.C_P = c.optional_number("C_P");
    t.c1 = c.optional_number("c1");
    t.c2 = c.optional_number("c2");
    t.varpi = c.optional_number("varpi");
    t.c3 = c.optional_number("c3");
    t.L = c.optional_number("L");
    c.finish();
  }
  o.finish();
  return t;
}

VelocitySpec parse_velocity(const json& j, const std::string& path) {
  Obj o(j, path);
  VelocitySpec v;
  const std::string kind = o.string("kind", "gaussian");
  v.kind = named(o.at("kind"), [&] { return velocity_kind_from_string(kind); });
  v.radius = o.optional_number("radius");
  if (v.radius && v.kind != VelocityKind::sphere_uniform) fail(o.at("radius"), "applies to sphere_uniform only");
  v.m2 = o.number("m2", 1.0);
  if (!(v.m2 > 0.0)) fail(o.at("m2"), "must be positive");
  v.gamma1 = o.number("gamma1", 1.0);
  v.gamma2 = o.number("gamma2", 1.0);
  if (v.kind == VelocityKind::spherically_symmetric) {
    if (!o.has("gamma1")) fail(o.at("gamma1"), "required for spherically_symmetric velocities");
    if (!o.has("gamma2")) fail(o.at("gamma2"), "required for spherically_symmetric velocities");
  }
  o.finish();
  return v;
}

RateFamily parse_rate(const json& j, const std::string& path) {
  std::string name;
  if (j.is_string()) {
    name = j.get<std::string>();
  } else {
    Obj o(j, path);
    name = o.string("family", "canonical");
    o.finish();
  }
  if (name == "canonical") return RateFamily::canonical;
  if (name == "softplus") return RateFamily::softplus;
  fail(path, "unknown rate '" + name + "' (canonical or softplus)");
}

SweepSpec parse_sweep(const json& j, const std::string& path) {
  Obj o(j, path);
  SweepSpec s;
  const std::string family = o.string("family", "gaussian");
  s.scaling.family = named(o.at("family"), [&] { return scaling_family_from_string(family); });
  const std::string sampler = o.string("sampler", "bps");
  s.scaling.sampler = named(o.at("sampler"), [&] { return scaling_sampler_from_string(sampler); });
  s.scaling.beta = o.number("beta", 1.0);
  if (s.scaling.beta < 1.0) fail(o.at("beta"), "must be >= 1");
  s.scaling.m2 = o.number("m2", 1.0);
  if (!(s.scaling.m2 > 0.0)) fail(o.at("m2"), "must be positive");
  s.scaling.lambda_ref = o.number("lambda_ref", 1.0);
  if (!(s.scaling.lambda_ref > 0.0)) fail(o.at("lambda_ref"), "must be > 0 (refreshment floor, H6)");
  const std::string mode = o.string("lambda_mode", "optimized");
  s.mode = named(o.at("lambda_mode"), [&] { return lambda_mode_from_string(mode); });
  const json* dims = o.get("dims");
  if (!dims || !dims->is_array() || dims->empty()) fail(o.at("dims"), "must be a non-empty list of dimensions");
  for (std::size_t i = 0; i < dims->size(); ++i) {
    const json& e = (*dims)[i];
    if (!e.is_number_integer() || e.get<long long>() < 1) {
      fail(o.at("dims") + "[" + std::to_string(i) + "]", "expected a positive integer");
    }
    s.dims.push_back(e.get<int>());
  }
  const std::string rate = o.string("rate", "canonical");
  if (rate == "softplus") {
    s.scaling.rate = certificate_of(phi_softplus(s.scaling.m2));
  } else if (rate != "canonical") {
    fail(o.at("rate"), "unknown rate '" + rate + "' (canonical or softplus)");
  }
  o.finish();
  return s;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  Obj o(j, "config");
  ExperimentConfig c;
  c.raw = j;
  const std::string sampler = o.string("sampler", "bps");
  c.sampler = named(o.at("sampler"), [&] { return sampler_kind_from_string(sampler); });
  if (const json* t = o.get("target")) c.target = parse_target(*t, o.at("target"));
  if (const json* v = o.get("velocity")) c.velocity = parse_velocity(*v, o.at("velocity"));
  if (const json* r = o.get("rate")) c.rate = parse_rate(*r, o.at("rate"));
  c.lambda_ref = o.number("lambda_ref", 1.0);
  if (c.lambda_ref < 0.0) fail(o.at("lambda_ref"), "must be >= 0");
  c.lambda_ref_coord = o.numbers("lambda_ref_coord");
  for (double r : c.lambda_ref_coord) {
    if (!(r >= 0.0)) fail(o.at("lambda_ref_coord"), "rates must be >= 0");
  }
  c.c_lambda = o.number("c_lambda", 0.0);
  if (c.c_lambda < 0.0) fail(o.at("c_lambda"), "must be >= 0");
  const std::string source = o.string("bound_source", "theorem1");
  c.bound_source = named(o.at("bound_source"), [&] { return bound_source_from_string(source); });
  c.horizon = o.number("horizon", 1000.0);
  if (!(c.horizon > 0.0)) fail(o.at("horizon"), "must be positive");
  const long long replicas = o.integer("replicas", 1);
  if (replicas < 1) fail(o.at("replicas"), "must be >= 1");
  c.replicas = static_cast<int>(replicas);
  c.seed = o.unsigned_integer("seed", 0);
  c.out = o.string("out", "out");
  if (const json* th = o.get("thinning")) {
    Obj t(*th, o.at("thinning"));
    c.thinning.lookahead = t.number("lookahead", 1.0);
    if (!(c.thinning.lookahead > 0.0)) fail(t.at("lookahead"), "must be positive");
    c.thinning.max_lookahead = t.number("max_lookahead", 1024.0);
    if (c.thinning.max_lookahead < c.thinning.lookahead) fail(t.at("max_lookahead"), "must be >= lookahead");
    c.thinning.force = t.boolean("force", false);
    t.finish();
  }
  if (const json* rh = o.get("rhmc")) {
    Obj r(*rh, o.at("rhmc"));
    const std::string flow = r.string("flow", "exact_quadratic");
    if (flow == "exact_quadratic") {
      c.flow_mode = RhmcFlowMode::exact_quadratic;
    } else if (flow == "leapfrog") {
      c.flow_mode = RhmcFlowMode::leapfrog;
    } else {
      fail(r.at("flow"), "expected exact_quadratic or leapfrog");
    }
    c.leapfrog_step = r.number("step", 0.0);
    if (c.leapfrog_step < 0.0) fail(r.at("step"), "must be >= 0");
    r.finish();
  }
  if (const json* dg = o.get("diagnostics")) {
    Obj g(*dg, o.at("diagnostics"));
    c.diagnostics.dt = g.number("dt", 0.5);
    if (!(c.diagnostics.dt > 0.0)) fail(g.at("dt"), "must be positive");
    c.diagnostics.burn_in = g.number("burn_in", 0.1);
    if (c.diagnostics.burn_in < 0.0 || c.diagnostics.burn_in >= 1.0) fail(g.at("burn_in"), "must lie in [0, 1)");
    const long long lag = g.integer("max_lag", 200);
    if (lag < 1) fail(g.at("max_lag"), "must be >= 1");
    c.diagnostics.max_lag = static_cast<std::size_t>(lag);
    const long long coord = g.integer("coordinate", 1);
    if (coord < 1 || coord > c.target.d) fail(g.at("coordinate"), "must be between 1 and target.d");
    c.diagnostics.coordinate = static_cast<int>(coord);
    g.finish();
  }
  if (const json* sw = o.get("sweep")) c.sweep = parse_sweep(*sw, o.at("sweep"));
  o.finish();

  if (!c.lambda_ref_coord.empty()) {
    if (c.sampler != SamplerKind::zigzag) fail(o.at("lambda_ref_coord"), "per-coordinate refreshment is Zig-Zag only");
    if (static_cast<int>(c.lambda_ref_coord.size()) != c.target.d) {
      fail(o.at("lambda_ref_coord"), "needs one rate per coordinate");
    }
  }
  // Surface model-level validation errors with their config paths.
  named(o.at("target"), [&] { return build_target(c.target); });
  named(o.at("velocity"), [&] { return build_velocity(c.velocity, c.target.d); });
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

TargetModel build_target(const TargetSpec& spec) {
  TargetModel base = [&] {
    if (spec.kind == "zero") return zero_target(spec.d, spec.domain);
    if (spec.kind == "product_beta") return product_beta_target(spec.d, spec.beta);
    if (spec.kind == "radial_beta") return radial_beta_target(spec.d, spec.beta);
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(spec.d, spec.d);
    if (!spec.precision.empty()) {
      for (int i = 0; i < spec.d; ++i) {
        for (int k = 0; k < spec.d; ++k) P(i, k) = spec.precision[static_cast<std::size_t>(i * spec.d + k)];
      }
    } else if (!spec.diagonal.empty()) {
      P = Eigen::VectorXd::Map(spec.diagonal.data(), spec.d).asDiagonal();
    }
    return gaussian_target(P);
  }();
  const bool overridden = spec.C_P || spec.c1 || spec.c2 || spec.varpi || spec.c3 || spec.L;
  if (!overridden) return base;
  TargetConstants c = base.constants();
  if (spec.C_P) c.C_P = *spec.C_P;
  if (spec.c1) c.c1 = *spec.c1;
  if (spec.c2) c.c2 = *spec.c2;
  if (spec.varpi) c.varpi = *spec.varpi;
  if (spec.c3) c.c3 = *spec.c3;
  if (spec.L) c.L = *spec.L;
  return base.with_constants(c);
}

VelocityModel build_velocity(const VelocitySpec& spec, int d) {
  switch (spec.kind) {
    case VelocityKind::gaussian: return VelocityModel::gaussian(d, spec.m2);
    case VelocityKind::rademacher: return VelocityModel::rademacher(d, spec.m2);
    case VelocityKind::sphere_uniform:
      return VelocityModel::sphere_uniform(d, spec.radius ? *spec.radius : std::sqrt(spec.m2 * d));
    case VelocityKind::spherically_symmetric: return VelocityModel::spherically_symmetric(d, spec.gamma1, spec.gamma2);
  }
  throw ValidationError("unknown velocity kind");
}

RateFunction build_rate(RateFamily family, double m2) {
  return family == RateFamily::softplus ? phi_softplus(m2) : phi_canonical();
}

SamplerConfig build_sampler_config(const ExperimentConfig& cfg, std::uint64_t replica) {
  TargetModel target = build_target(cfg.target);
  VelocityModel velocity = build_velocity(cfg.velocity, cfg.target.d);
  SamplerConfig s(cfg.sampler, target, velocity, build_rate(cfg.rate, velocity.m2()));
  s.lambda_ref = cfg.lambda_ref;
  s.lambda_ref_coord = cfg.lambda_ref_coord;
  s.horizon = cfg.horizon;
  s.seed = cfg.seed;
  s.replica = replica;
  s.thinning = cfg.thinning;
  s.flow_mode = cfg.flow_mode;
  s.leapfrog_step = cfg.leapfrog_step;
  s.validate();
  return s;
}

BoundReport compute_bound(const ExperimentConfig& cfg) {
  const TargetModel target = build_target(cfg.target);
  const VelocityModel velocity = build_velocity(cfg.velocity, cfg.target.d);
  const RateFunction rate = build_rate(cfg.rate, velocity.m2());
  double floor = cfg.lambda_ref;
  std::string floor_path = "config.lambda_ref";
  if (!cfg.lambda_ref_coord.empty()) {
    floor = *std::min_element(cfg.lambda_ref_coord.begin(), cfg.lambda_ref_coord.end());
    floor_path = "config.lambda_ref_coord";
  }
  if (!(floor > 0.0)) {
    fail(floor_path, "must be > 0 for the bound: the refreshment floor must be strictly positive (H6)");
  }
  if (cfg.bound_source == BoundSource::theorem17) {
    if (cfg.sampler != SamplerKind::zigzag) fail("config.bound_source", "theorem17 applies to the zigzag sampler only");
    if (!target.constants().c3) {
      fail("config.target.constants.c3", "missing; required by bound_source theorem17");
    }
    return theorem17_constants(target, velocity, rate, floor);
  }
  FieldDecomposition decomp = cfg.sampler == SamplerKind::zigzag ? decompose_zigzag(target)
                              : cfg.sampler == SamplerKind::bps  ? decompose_bps(target)
                                                                 : decompose_rhmc(target);
  return theorem1_constants(target, velocity, rate, decomp, floor, cfg.c_lambda);
}

}  // namespace pdmpkit
