#include "pdmpkit/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pdmpkit/errors.hpp"
#include "pdmpkit/simd.hpp"

namespace pdmpkit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm(std::span<const double> v) { return std::sqrt(simd::sum_squares(v)); }

}  // namespace

SamplerConfig::SamplerConfig(SamplerKind s, TargetModel t, VelocityModel v, RateFunction r)
    : sampler(s), target(std::move(t)), velocity(std::move(v)), rate(r) {}

void SamplerConfig::validate() const {
  if (velocity.dim() != target.dim()) {
    throw ValidationError("velocity dimension " + std::to_string(velocity.dim()) + " does not match target dimension " +
                          std::to_string(target.dim()));
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("horizon must be positive");
  if (!(lambda_ref >= 0.0) || !std::isfinite(lambda_ref)) throw ValidationError("lambda_ref must be non-negative");
  if (!lambda_ref_coord.empty()) {
    if (sampler != SamplerKind::zigzag) throw ValidationError("per-coordinate refreshment is a Zig-Zag option");
    if (lambda_ref_coord.size() != static_cast<std::size_t>(target.dim())) {
      throw ValidationError("lambda_ref_coord needs one rate per coordinate");
    }
    for (double r : lambda_ref_coord) {
      if (!(r >= 0.0) || !std::isfinite(r)) throw ValidationError("lambda_ref_coord entries must be non-negative");
    }
  }
  if (!(thinning.lookahead > 0.0) || thinning.max_lookahead < thinning.lookahead) {
    throw ValidationError("thinning lookahead must be positive and not exceed max_lookahead");
  }
  if (sampler == SamplerKind::bps && !velocity.rotation_invariant()) {
    throw ValidationError("bps needs a rotation-invariant velocity law (gaussian, sphere_uniform, spherically_symmetric)");
  }
  if (sampler == SamplerKind::rhmc) {
    if (velocity.kind() != VelocityKind::gaussian) throw ValidationError("rhmc needs gaussian velocities");
    if (flow_mode == RhmcFlowMode::exact_quadratic && target.precision() == nullptr && !target.is_zero()) {
      throw ValidationError("exact_quadratic flow needs a gaussian target; use leapfrog");
    }
    if (flow_mode == RhmcFlowMode::leapfrog && leapfrog_step == 0.0 && !target.constants().L) {
      throw MissingLipschitz("leapfrog default step needs the gradient Lipschitz constant L");
    }
  }
  const auto d = static_cast<Eigen::Index>(target.dim());
  if (x0 && x0->size() != d) throw ValidationError("x0 has the wrong dimension");
  if (v0 && v0->size() != d) throw ValidationError("v0 has the wrong dimension");
}

void reflect(std::span<double> v, std::span<const double> F) {
  const double f2 = simd::sum_squares(F);
  if (f2 == 0.0) return;
  const double coef = 2.0 * simd::dot(v, F) / f2;
  simd::axpy(-coef, F, v);
}

Eigen::VectorXd reflect(const Eigen::VectorXd& v, const Eigen::VectorXd& F) {
  Eigen::VectorXd out = v;
  reflect(std::span<double>(out.data(), static_cast<std::size_t>(out.size())),
          std::span<const double>(F.data(), static_cast<std::size_t>(F.size())));
  return out;
}

void flip_coordinate(std::span<double> v, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > v.size()) {
    throw ValidationError("coordinate index " + std::to_string(k) + " out of range 1.." + std::to_string(v.size()));
  }
  v[static_cast<std::size_t>(k - 1)] = -v[static_cast<std::size_t>(k - 1)];
}

Eigen::VectorXd flip_coordinate(const Eigen::VectorXd& v, int k) {
  Eigen::VectorXd out = v;
  flip_coordinate(std::span<double>(out.data(), static_cast<std::size_t>(out.size())), k);
  return out;
}

Eigen::VectorXd refresh_full(const VelocityModel& model, Rng& rng) { return model.sample(rng); }

PiecewiseLinearBound default_rate_bound(const TargetModel& target, const RateFunction& rate, double m2,
                                        std::span<const double> x, std::span<const double> v, double h,
                                        int channel) {
  const std::size_t d = x.size();
  std::vector<double> g(d);
  target.gradient(x, g);
  const double base = rate.c_phi * std::sqrt(m2);
  const auto& L = target.constants().L;

  auto curvature = [&](std::size_t k) {
    const double end = x[k] + h * v[k];
    return target.curvature_bound(static_cast<int>(k), std::min(x[k], end), std::max(x[k], end));
  };

  double a = 0.0;
  double b = 0.0;
  if (channel == 0) {
    a = base + rate.C_phi * std::abs(simd::dot(v, g));
    if (target.has_curvature_bound()) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += v[k] * v[k] * curvature(k);
      b = rate.C_phi * s;
    } else if (L) {
      b = rate.C_phi * *L * simd::sum_squares(v);
    } else {
      throw MissingLipschitz("target '" + target.name() + "' has no Lipschitz constant L for the thinning envelope");
    }
  } else {
    const auto k = static_cast<std::size_t>(channel - 1);
    a = base + rate.C_phi * std::abs(v[k] * g[k]);
    if (target.has_curvature_bound()) {
      b = rate.C_phi * v[k] * v[k] * curvature(k);
    } else if (L) {
      b = rate.C_phi * std::abs(v[k]) * *L * norm(v);
    } else {
      throw MissingLipschitz("target '" + target.name() + "' has no Lipschitz constant L for the thinning envelope");
    }
  }
  return PiecewiseLinearBound::affine(a, b, h);
}

namespace {

class Engine {
 public:
  explicit Engine(const SamplerConfig& cfg)
      : cfg_(cfg),
        d_(static_cast<std::size_t>(cfg.target.dim())),
        rng_(make_stream(cfg.seed, cfg.replica)),
        sqrt_m2_(std::sqrt(cfg.velocity.m2())),
        x_(d_),
        v_(d_),
        g_(d_),
        pv_(d_),
        tmp_x_(d_),
        tmp_g_(d_) {
    const TargetModel& target = cfg.target;
    const bool quadratic = target.precision() != nullptr;
    exact_affine_ = cfg.rate.family == RateFamily::canonical && (quadratic || target.is_zero()) && !cfg.thinning.force;

    if (cfg.sampler == SamplerKind::rhmc && !target.is_zero()) {
      if (cfg.flow_mode == RhmcFlowMode::exact_quadratic) {
        flow_ = std::make_shared<HarmonicFlow>(*target.precision_eigenvectors(), *target.precision_eigenvalues(),
                                               cfg.velocity.m2());
      } else {
        double step = cfg.leapfrog_step;
        if (step == 0.0) step = 0.01 / std::sqrt(cfg.velocity.m2() * *target.constants().L);
        leapfrog_ = std::make_shared<LeapfrogFlow>(target, cfg.velocity.m2(), step);
        flow_ = leapfrog_;
      }
    } else {
      flow_ = std::make_shared<LinearFlow>(target.domain());
    }

    if (cfg.x0) {
      std::copy(cfg.x0->data(), cfg.x0->data() + d_, x_.begin());
    } else if (target.can_sample_exactly()) {
      target.sample_exact(rng_, x_);
      exact_start_ = true;
    } else {
      const Eigen::VectorXd m = target.mode();
      std::copy(m.data(), m.data() + d_, x_.begin());
    }
    if (cfg.v0) {
      std::copy(cfg.v0->data(), cfg.v0->data() + d_, v_.begin());
    } else {
      cfg.velocity.sample(rng_, v_);
    }

    refresh_rate_ = sqrt_m2_ * cfg.lambda_ref;
    if (!cfg.lambda_ref_coord.empty()) {
      coord_rates_.resize(d_);
      for (std::size_t k = 0; k < d_; ++k) coord_rates_[k] = sqrt_m2_ * cfg.lambda_ref_coord[k];
      refresh_rate_ = std::accumulate(coord_rates_.begin(), coord_rates_.end(), 0.0);
    }
  }

  SimulationResult run() {
    EventSkeleton sk(cfg_.sampler, static_cast<int>(d_), cfg_.target.domain(), flow_,
                     Eigen::Map<Eigen::VectorXd>(x_.data(), static_cast<Eigen::Index>(d_)),
                     Eigen::Map<Eigen::VectorXd>(v_.data(), static_cast<Eigen::Index>(d_)));
    const double T = cfg_.horizon;
    double t = 0.0;
    double window = cfg_.thinning.lookahead;
    std::size_t n_events = 0;
    std::vector<double> v_before(d_);
    refresh_derived();

    for (;;) {
      double best = kInf;
      int best_channel = 0;
      EventKind best_kind = EventKind::bounce;
      bool unresolved = false;

      const int channels = cfg_.sampler == SamplerKind::zigzag ? static_cast<int>(d_)
                           : cfg_.sampler == SamplerKind::bps  ? 1
                                                               : 0;
      for (int k = 1; k <= channels; ++k) {
        const auto tau = channel_time(cfg_.sampler == SamplerKind::zigzag ? k : 0, window);
        if (!tau) {
          unresolved = true;
          continue;
        }
        if (*tau < best) {
          best = *tau;
          best_channel = k;
          best_kind = EventKind::bounce;
        }
      }
      if (refresh_rate_ > 0.0) {
        const double tau = exponential1(rng_) / refresh_rate_;
        if (tau < best) {
          best = tau;
          if (coord_rates_.empty()) {
            best_kind = EventKind::refresh_full;
            best_channel = 0;
          } else {
            best_kind = EventKind::refresh_coord;
            best_channel = pick_coordinate();
          }
        }
      }

      const double remaining = T - t;
      const double resolved_until = unresolved ? window : kInf;
      if (best >= remaining || best > resolved_until) {
        const double step = std::min(remaining, resolved_until);
        advance(step);
        if (step == remaining) {
          t = T;
          sk.push(t, EventKind::end, 0, x_, v_, v_);
          break;
        }
        t += step;
        window = std::min(2.0 * window, cfg_.thinning.max_lookahead);
        ++stats_.window_extensions;
        continue;
      }

      advance(best);
      t += best;
      std::copy(v_.begin(), v_.end(), v_before.begin());
      apply_event(best_kind, best_channel);
      check_finite(t);
      sk.push(t, best_kind, best_channel, x_, v_before, v_);
      window = cfg_.thinning.lookahead;
      ++n_events;
      if (cfg_.max_events != 0 && n_events >= cfg_.max_events) break;
    }
    return {std::move(sk), stats_, exact_start_};
  }

 private:
  // Gradient at x and, for quadratic targets, P·v.
  void refresh_derived() {
    cfg_.target.gradient(x_, g_);
    update_pv();
  }

  void update_pv() {
    if (const Eigen::MatrixXd* P = cfg_.target.precision()) {
      for (std::size_t i = 0; i < d_; ++i) {
        pv_[i] = simd::dot(std::span<const double>(P->col(static_cast<Eigen::Index>(i)).data(), d_), v_);
      }
    } else {
      std::fill(pv_.begin(), pv_.end(), 0.0);
    }
  }

  void advance(double tau) {
    if (tau <= 0.0) return;
    if (leapfrog_) {
      const double drift = leapfrog_->advance_tracking_energy(x_, v_, tau);
      if (drift > 1e-3) {
        throw SimulationAbort("leapfrog energy drift " + std::to_string(drift) +
                              " exceeds 1e-3 within a segment; reduce the step");
      }
    } else {
      flow_->advance(x_, v_, tau);
    }
    cfg_.target.gradient(x_, g_);
    if (!flow_->is_linear()) update_pv();
  }

  // Time to the next event of one bounce channel (0: BPS, k ≥ 1: Zig-Zag
  // coordinate k). nullopt when thinning finds nothing within the window.
  std::optional<double> channel_time(int k, double window) {
    if (exact_affine_) {
      const double mass = exponential1(rng_);
      double a, b;
      if (k == 0) {
        a = simd::dot(v_, g_);
        b = simd::dot(v_, pv_);
      } else {
        const auto i = static_cast<std::size_t>(k - 1);
        a = v_[i] * g_[i];
        b = v_[i] * pv_[i];
      }
      return affine_event_time(a, b, mass);
    }
    const PiecewiseLinearBound bound =
        default_rate_bound(cfg_.target, cfg_.rate, cfg_.velocity.m2(), x_, v_, window, k);
    auto rate = [&](double s) {
      for (std::size_t i = 0; i < d_; ++i) tmp_x_[i] = x_[i] + s * v_[i];
      cfg_.target.gradient(tmp_x_, tmp_g_);
      const double arg = k == 0 ? simd::dot(v_, tmp_g_)
                                : v_[static_cast<std::size_t>(k - 1)] * tmp_g_[static_cast<std::size_t>(k - 1)];
      return cfg_.rate(arg);
    };
    const ThinningResult res = next_event_time(rate, bound, rng_);
    stats_.proposals += static_cast<std::size_t>(res.proposals);
    stats_.rejections += static_cast<std::size_t>(res.rejections);
    return res.time;
  }

  int pick_coordinate() {
    const double u = uniform01(rng_) * refresh_rate_;
    double acc = 0.0;
    for (std::size_t k = 0; k < d_; ++k) {
      acc += coord_rates_[k];
      if (u < acc) return static_cast<int>(k + 1);
    }
    return static_cast<int>(d_);
  }

  void apply_event(EventKind kind, int channel) {
    switch (kind) {
      case EventKind::bounce:
        if (cfg_.sampler == SamplerKind::zigzag) {
          flip_coordinate(v_, channel);
        } else {
          reflect(v_, g_);
        }
        break;
      case EventKind::refresh_full: cfg_.velocity.sample(rng_, v_); break;
      case EventKind::refresh_coord: flip_coordinate(v_, channel); break;
      case EventKind::end: break;
    }
    update_pv();
  }

  void check_finite(double t) const {
    for (std::size_t i = 0; i < d_; ++i) {
      if (!std::isfinite(x_[i]) || !std::isfinite(v_[i])) {
        throw SimulationAbort("non-finite state at t = " + std::to_string(t));
      }
    }
  }

  const SamplerConfig& cfg_;
  std::size_t d_;
  Rng rng_;
  double sqrt_m2_;
  std::vector<double> x_, v_, g_, pv_, tmp_x_, tmp_g_;
  std::vector<double> coord_rates_;
  double refresh_rate_ = 0.0;
  bool exact_affine_ = false;
  bool exact_start_ = false;
  std::shared_ptr<const Flow> flow_;
  std::shared_ptr<const LeapfrogFlow> leapfrog_;
  SimulationStats stats_;
};

void require_sampler(const SamplerConfig& cfg, SamplerKind kind) {
  if (cfg.sampler != kind) {
    throw ValidationError(std::string("config.sampler is ") + to_string(cfg.sampler) + ", expected " + to_string(kind));
  }
}

}  // namespace

SimulationResult simulate(const SamplerConfig& config) {
  config.validate();
  return Engine(config).run();
}

EventSkeleton simulate_zigzag(const SamplerConfig& config) {
  require_sampler(config, SamplerKind::zigzag);
  return simulate(config).skeleton;
}

EventSkeleton simulate_bps(const SamplerConfig& config) {
  require_sampler(config, SamplerKind::bps);
  return simulate(config).skeleton;
}

EventSkeleton simulate_rhmc(const SamplerConfig& config) {
  require_sampler(config, SamplerKind::rhmc);
  return simulate(config).skeleton;
}

}  // namespace pdmpkit
