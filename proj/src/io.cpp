#include "pdmpkit/io.hpp"

#include <charconv>
#include <cmath>

#include "pdmpkit/errors.hpp"

namespace pdmpkit {

using nlohmann::json;

const char* toolkit_version() { return PDMPKIT_VERSION; }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const json& config) {
  static const char* hex = "0123456789abcdef";
  std::uint64_t h = fnv1a64(config.dump());
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = hex[h & 0xf];
  return out;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json inputs_json(const BoundInputs& in) {
  json t = {{"C_P", in.target.C_P}, {"c1", in.target.c1}, {"c2", in.target.c2}, {"varpi", in.target.varpi},
            {"c3", optional_json(in.target.c3)}, {"L", optional_json(in.target.L)}};
  return {{"d", in.d},
          {"K", in.K()},
          {"a", in.a},
          {"target", t},
          {"velocity", {{"m2", in.velocity.m2}, {"m4", in.velocity.m4}, {"m22", in.velocity.m22}}},
          {"rate", {{"C_phi", in.rate.C_phi}, {"c_phi", in.rate.c_phi}}},
          {"lambda_lower", in.lambda_lower},
          {"c_lambda", in.c_lambda}};
}

}  // namespace

json to_json(const BoundReport& r) {
  json j = {{"source", to_string(r.source)},
            {"inputs", inputs_json(r.inputs)},
            {"kappa1", r.kappa1},
            {"kappa2", optional_json(r.kappa2)},
            {"R0_bar", optional_json(r.R0_bar)},
            {"R0", r.R0},
            {"lambda_v", r.lambda_v},
            {"lambda_x", r.lambda_x},
            {"epsilon0", r.epsilon0},
            {"Lambda_at_eps0", r.Lambda_at_eps0},
            {"alpha", r.alpha},
            {"A", r.A},
            {"iact_bound", r.iact_bound},
            {"lemma6_lower", optional_json(r.lemma6_lower)},
            {"lemma6_upper", optional_json(r.lemma6_upper)},
            {"epsilon_star", r.epsilon_star},
            {"alpha_star", r.alpha_star}};
  if (r.lemma6_lower && r.lemma6_upper) {
    j["lemma6_holds"] = *r.lemma6_lower <= r.alpha && r.alpha <= *r.lemma6_upper;
  }
  return j;
}

json to_json(const IactEstimate& e) {
  return {{"tau_hat", e.tau_hat}, {"stderr", e.std_error}, {"method", e.method},
          {"batches", e.batches}, {"batch_size", e.batch_size}, {"dt", e.dt}};
}

json to_json(const Verdict& v) {
  return {{"tau_hat", v.tau_hat}, {"stderr", v.std_error}, {"bound", v.bound}, {"ratio", v.ratio}, {"pass", v.pass}};
}

json to_json(const DecayFit& f) {
  return {{"alpha_hat", f.alpha_hat}, {"stderr", f.std_error}, {"lags_used", f.lags_used}};
}

json to_json(const ScalingTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"d", r.d},
                    {"lambda_opt", r.lambda_opt},
                    {"alpha", r.alpha},
                    {"alpha_inv", r.alpha_inv},
                    {"slope", std::isnan(r.slope) ? json(nullptr) : json(r.slope)}});
  }
  return {{"family", to_string(t.spec.family)},
          {"sampler", to_string(t.spec.sampler)},
          {"beta", t.spec.beta},
          {"m2", t.spec.m2},
          {"lambda_mode", to_string(t.mode)},
          {"fitted_slope", t.fitted_slope},
          {"rows", rows}};
}

json stamp(json doc, const std::string& hash) {
  doc["toolkit_version"] = toolkit_version();
  doc["config_hash"] = hash;
  return doc;
}

namespace {

void header(std::ostream& out, const std::string& hash) {
  out << "# pdmpkit " << toolkit_version() << "\n# config_hash " << hash << "\n";
}

void write_state(std::ostream& out, std::span<const double> x, std::span<const double> v) {
  for (double xi : x) out << ',' << format_double(xi);
  for (double vi : v) out << ',' << format_double(vi);
  out << '\n';
}

}  // namespace

void write_skeleton_csv(std::ostream& out, const EventSkeleton& sk, const std::string& hash) {
  header(out, hash);
  out << "t,kind,k";
  for (int i = 1; i <= sk.dim(); ++i) out << ",x" << i;
  for (int i = 1; i <= sk.dim(); ++i) out << ",v" << i;
  out << '\n';
  const auto d = static_cast<std::size_t>(sk.dim());
  out << "0,start,0";
  write_state(out, {sk.x0().data(), d}, {sk.v0().data(), d});
  for (std::size_t i = 0; i < sk.size(); ++i) {
    out << format_double(sk.time(i)) << ',' << to_string(sk.kind(i)) << ',' << sk.channel(i);
    write_state(out, sk.x(i), sk.v_after(i));
  }
}

void write_scaling_csv(std::ostream& out, const ScalingTable& t, const std::string& hash) {
  header(out, hash);
  out << "d,lambda_opt,alpha,alpha_inv,slope\n";
  for (const auto& r : t.rows) {
    out << r.d << ',' << format_double(r.lambda_opt) << ',' << format_double(r.alpha) << ','
        << format_double(r.alpha_inv) << ',' << format_double(r.slope) << '\n';
  }
}

void write_lag_csv(std::ostream& out, const DecayFit& fit, double dt, const std::string& hash) {
  header(out, hash);
  out << "lag,time,autocov,stderr,used\n";
  for (const auto& r : fit.table) {
    out << r.lag << ',' << format_double(static_cast<double>(r.lag) * dt) << ',' << format_double(r.autocov) << ','
        << format_double(r.std_error) << ',' << (r.used ? 1 : 0) << '\n';
  }
}

json skeleton_summary(const SimulationResult& result, double t_begin) {
  const EventSkeleton& sk = result.skeleton;
  const int d = sk.dim();
  const auto counts = sk.counts();
  json j = {{"sampler", to_string(sk.sampler())},
            {"d", d},
            {"horizon", sk.horizon()},
            {"t_begin", t_begin},
            {"exact_start", result.exact_start},
            {"events",
             {{"bounce", counts[0]}, {"refresh_full", counts[1]}, {"refresh_coord", counts[2]}}},
            {"thinning",
             {{"proposals", result.stats.proposals},
              {"rejections", result.stats.rejections},
              {"window_extensions", result.stats.window_extensions}}}};
  std::vector<double> mean(static_cast<std::size_t>(d));
  std::vector<double> second(static_cast<std::size_t>(d));
  if (sk.flow().is_linear() && sk.domain() == Domain::euclidean) {
    for (int i = 1; i <= d; ++i) {
      mean[static_cast<std::size_t>(i - 1)] = path_average_exact(sk, Polynomial::coordinate(d, i, 1), "x", t_begin).value;
      second[static_cast<std::size_t>(i - 1)] =
          path_average_exact(sk, Polynomial::coordinate(d, i, 2), "x^2", t_begin).value;
    }
    j["moment_method"] = "exact_polynomial";
  } else {
    const double dt = 0.01;
    const Discretization disc = discretize(sk, dt, t_begin);
    for (Eigen::Index k = 0; k < disc.x.cols(); ++k) {
      mean[static_cast<std::size_t>(k)] = disc.x.col(k).mean();
      second[static_cast<std::size_t>(k)] = disc.x.col(k).squaredNorm() / static_cast<double>(disc.x.rows());
    }
    j["moment_method"] = "grid";
    j["moment_grid_dt"] = dt;
  }
  j["mean_x"] = mean;
  j["mean_x2"] = second;
  return j;
}

}  // namespace pdmpkit
