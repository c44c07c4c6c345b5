// Command-line front end: bound, sample, sweep and verify.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "pdmpkit/config.hpp"
#include "pdmpkit/diagnostics.hpp"
#include "pdmpkit/errors.hpp"
#include "pdmpkit/io.hpp"
#include "pdmpkit/parallel.hpp"
#include "pdmpkit/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pdmpkit;

namespace {

enum Exit { kOk = 0, kValidation = 1, kRuntime = 2, kVerification = 3 };

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicas;
  std::optional<std::string> out;
  int jobs = 1;
  std::string suite;
};

struct Loaded {
  ExperimentConfig cfg;
  std::string hash;
  fs::path out;
};

Loaded load(const Options& opt) {
  if (opt.config.empty()) throw ValidationError("--config is required for this subcommand");
  Loaded l{load_config(opt.config), {}, {}};
  if (opt.seed) l.cfg.seed = *opt.seed;
  if (opt.replicas) {
    if (*opt.replicas < 1) throw ValidationError("--replicas must be >= 1");
    l.cfg.replicas = *opt.replicas;
  }
  if (opt.out) l.cfg.out = *opt.out;
  // Hash the effective experiment; the output location is not part of it.
  json effective = l.cfg.raw;
  effective["seed"] = l.cfg.seed;
  effective["replicas"] = l.cfg.replicas;
  effective.erase("out");
  l.cfg.raw = effective;
  l.hash = config_hash(effective);
  l.out = l.cfg.out;
  fs::create_directories(l.out);
  return l;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream f(path);
  f << doc.dump(2) << '\n';
}

int cmd_bound(const Options& opt) {
  const Loaded l = load(opt);
  const BoundReport report = compute_bound(l.cfg);
  json doc = to_json(report);
  doc["sampler"] = to_string(l.cfg.sampler);
  doc["config"] = l.cfg.raw;
  write_json(l.out / "bound.json", stamp(doc, l.hash));
  std::cout << "alpha " << format_double(report.alpha) << "  A " << format_double(report.A) << "  iact_bound "
            << format_double(report.iact_bound) << "\nwrote " << (l.out / "bound.json").string() << '\n';
  return kOk;
}

int cmd_sample(const Options& opt) {
  const Loaded l = load(opt);
  const ExperimentConfig& cfg = l.cfg;
  std::optional<BoundReport> bound;
  std::string bound_note;
  try {
    bound = compute_bound(cfg);
  } catch (const ValidationError& e) {
    bound_note = e.what();
  }

  const auto n = static_cast<std::size_t>(cfg.replicas);
  std::vector<json> summaries(n);
  std::vector<std::optional<IactEstimate>> iacts(n);
  parallel_for(n, opt.jobs, [&](std::size_t r) {
    const SamplerConfig sc = build_sampler_config(cfg, r);
    const SimulationResult res = simulate(sc);
    char name[32];
    std::snprintf(name, sizeof name, "skeleton_r%03zu.csv", r);
    {
      std::ofstream f(l.out / name);
      write_skeleton_csv(f, res.skeleton, l.hash);
    }
    const double t0 = burn_in_time(res, cfg.diagnostics.burn_in);
    json s = skeleton_summary(res, t0);
    s["replica"] = r;
    s["skeleton_file"] = name;
    const Discretization disc = discretize(res.skeleton, cfg.diagnostics.dt, t0);
    const Eigen::VectorXd col = disc.x.col(cfg.diagnostics.coordinate - 1);
    const std::span<const double> series(col.data(), static_cast<std::size_t>(col.size()));
    if (series.size() >= 400 && cfg.target.domain == Domain::euclidean) {
      iacts[r] = iact_batch_means(series, cfg.diagnostics.dt);
      s["iact"] = to_json(*iacts[r]);
      try {
        const DecayFit fit = decay_rate_fit(series, cfg.diagnostics.dt, cfg.diagnostics.max_lag);
        s["decay"] = to_json(fit);
        std::snprintf(name, sizeof name, "lags_r%03zu.csv", r);
        std::ofstream f(l.out / name);
        write_lag_csv(f, fit, cfg.diagnostics.dt, l.hash);
      } catch (const InsufficientSignal& e) {
        s["decay"] = {{"error", e.what()}};
      }
    } else {
      s["iact"] = {{"skipped", "needs at least 400 samples of a euclidean position"}};
    }
    summaries[r] = std::move(s);
  });

  json doc = {{"sampler", to_string(cfg.sampler)},
              {"replicas", cfg.replicas},
              {"test_function", "x" + std::to_string(cfg.diagnostics.coordinate)},
              {"per_replica", summaries},
              {"config", cfg.raw}};
  std::vector<IactEstimate> have;
  for (const auto& e : iacts) {
    if (e) have.push_back(*e);
  }
  if (!have.empty()) {
    const IactEstimate pooled = combine_iact(have);
    doc["iact"] = to_json(pooled);
    if (bound) doc["verdict"] = to_json(compare_to_bound(pooled, *bound));
  }
  if (bound) {
    doc["bound"] = {{"source", to_string(bound->source)}, {"alpha", bound->alpha}, {"A", bound->A},
                    {"iact_bound", bound->iact_bound}};
  } else {
    doc["bound"] = {{"error", bound_note}};
  }
  write_json(l.out / "summary.json", stamp(doc, l.hash));
  std::cout << "wrote " << n << " skeleton file(s) and " << (l.out / "summary.json").string() << '\n';
  return kOk;
}

int cmd_sweep(const Options& opt) {
  const Loaded l = load(opt);
  if (!l.cfg.sweep) throw ValidationError("config.sweep: required by the sweep subcommand");
  const SweepSpec& sw = *l.cfg.sweep;
  const ScalingTable table = scaling_report(sw.scaling, sw.dims, sw.mode, opt.jobs);
  {
    std::ofstream f(l.out / "scaling.csv");
    write_scaling_csv(f, table, l.hash);
  }
  json doc = to_json(table);
  doc["config"] = l.cfg.raw;
  write_json(l.out / "sweep_summary.json", stamp(doc, l.hash));
  std::cout << "fitted slope of log(1/alpha) vs log d: " << format_double(table.fitted_slope) << "\nwrote "
            << (l.out / "scaling.csv").string() << '\n';
  return kOk;
}

int cmd_verify(const Options& opt) {
  std::vector<std::string> suites;
  if (opt.suite == "all") {
    suites = suite_names();
  } else {
    suites = {opt.suite};
  }
  const std::uint64_t seed = opt.seed.value_or(0);
  bool ok = true;
  json reports = json::array();
  for (const auto& name : suites) {
    const SuiteReport rep = run_suite(name, seed);
    for (const auto& c : rep.checks) {
      std::cout << (c.pass ? "PASS " : "FAIL ") << rep.suite << ": " << c.name << "  (" << c.detail << ")\n";
    }
    ok = ok && rep.passed();
    reports.push_back(to_json(rep));
  }
  if (opt.out) {
    fs::create_directories(*opt.out);
    json doc = {{"seed", seed}, {"suites", reports}, {"pass", ok}};
    write_json(fs::path(*opt.out) / "verify.json", stamp(doc, config_hash({{"verify", opt.suite}, {"seed", seed}})));
  }
  std::cout << (ok ? "verification passed\n" : "verification FAILED\n");
  return ok ? kOk : kVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pdmpkit: PDMP samplers, explicit convergence-rate bounds and diagnostics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(toolkit_version()));
  Options opt;

  auto common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", opt.config, "experiment config (JSON)");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "override the config seed");
    sub->add_option("--out", opt.out, "output directory");
  };
  auto* bound = app.add_subcommand("bound", "compute the convergence-rate bound report");
  common(bound, true);
  auto* sample = app.add_subcommand("sample", "simulate skeletons and run diagnostics");
  common(sample, true);
  sample->add_option("--replicas", opt.replicas, "override the replica count");
  sample->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
  auto* sweep = app.add_subcommand("sweep", "dimension-scaling table of the bound");
  common(sweep, true);
  sweep->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
  auto* verify = app.add_subcommand("verify", "run a property suite (or 'all')");
  common(verify, false);
  verify->add_option("suite", opt.suite, "suite name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*bound) return cmd_bound(opt);
    if (*sample) return cmd_sample(opt);
    if (*sweep) return cmd_sweep(opt);
    if (*verify) return cmd_verify(opt);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
