#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pdmpkit/targets.hpp"

namespace pdmpkit {

enum class SamplerKind { zigzag, bps, rhmc };

const char* to_string(SamplerKind kind);
SamplerKind sampler_kind_from_string(const std::string& name);

enum class EventKind : std::uint8_t { bounce, refresh_full, refresh_coord, end };

const char* to_string(EventKind kind);

/// Deterministic dynamics between events. advance() moves (x, v) forward by
/// time t in place.
class Flow {
 public:
  virtual ~Flow() = default;
  virtual void advance(std::span<double> x, std::span<double> v, double t) const = 0;
  /// True when x(t) = x + t·v between events.
  virtual bool is_linear() const = 0;
  virtual std::string name() const = 0;
};

/// ẋ = v, v̇ = 0; positions wrapped into [0,1)^d on the torus.
class LinearFlow final : public Flow {
 public:
  explicit LinearFlow(Domain domain) : domain_(domain) {}
  void advance(std::span<double> x, std::span<double> v, double t) const override;
  bool is_linear() const override { return true; }
  std::string name() const override { return "linear"; }

 private:
  Domain domain_;
};

/// Exact solution of ẋ = v, v̇ = −m2·Px in the eigenbasis of P.
class HarmonicFlow final : public Flow {
 public:
  HarmonicFlow(Eigen::MatrixXd eigenvectors, const Eigen::VectorXd& eigenvalues, double m2);
  void advance(std::span<double> x, std::span<double> v, double t) const override;
  bool is_linear() const override { return false; }
  std::string name() const override { return "exact_quadratic"; }

 private:
  Eigen::MatrixXd Q_;
  Eigen::VectorXd omega_;
};

/// Leapfrog integration of ẋ = v, v̇ = −m2·∇U(x) with a fixed step; the last
/// step of a segment is shortened to land on the requested time.
class LeapfrogFlow final : public Flow {
 public:
  LeapfrogFlow(TargetModel target, double m2, double step);
  void advance(std::span<double> x, std::span<double> v, double t) const override;
  bool is_linear() const override { return false; }
  std::string name() const override { return "leapfrog"; }
  double step() const { return step_; }
  /// Advances like advance() and returns max |H(s) − H(0)| / |H(0)| seen.
  double advance_tracking_energy(std::span<double> x, std::span<double> v, double t) const;
  double hamiltonian(std::span<const double> x, std::span<const double> v) const;

 private:
  void kick(std::span<const double> x, std::span<double> v, double h, std::vector<double>& g) const;

  TargetModel target_;
  double m2_;
  double step_;
};

/// Complete record of a PDMP trajectory: each event stores its time, kind,
/// channel (1-based; 0 when not applicable), position, and the velocity
/// before and after. Positions are unchanged by events, so one x is kept.
class EventSkeleton {
 public:
  EventSkeleton() = default;
  EventSkeleton(SamplerKind sampler, int d, Domain domain, std::shared_ptr<const Flow> flow,
                Eigen::VectorXd x0, Eigen::VectorXd v0);

  SamplerKind sampler() const { return sampler_; }
  int dim() const { return d_; }
  Domain domain() const { return domain_; }
  const Flow& flow() const { return *flow_; }
  std::shared_ptr<const Flow> flow_ptr() const { return flow_; }
  const Eigen::VectorXd& x0() const { return x0_; }
  const Eigen::VectorXd& v0() const { return v0_; }
  /// Final time of the record (the `end` event), or the last event time.
  double horizon() const { return times_.empty() ? 0.0 : times_.back(); }

  std::size_t size() const { return times_.size(); }
  double time(std::size_t i) const { return times_[i]; }
  EventKind kind(std::size_t i) const { return kinds_[i]; }
  int channel(std::size_t i) const { return channels_[i]; }
  std::span<const double> x(std::size_t i) const { return row(xs_, i); }
  std::span<const double> v_before(std::size_t i) const { return row(vb_, i); }
  std::span<const double> v_after(std::size_t i) const { return row(va_, i); }

  void push(double t, EventKind kind, int channel, std::span<const double> x, std::span<const double> v_before,
            std::span<const double> v_after);

  /// Number of events of each kind, indexed by EventKind.
  std::array<std::size_t, 4> counts() const;

  /// Position and velocity at time t (0 ≤ t ≤ horizon), reconstructed from the
  /// nearest preceding event through the flow.
  void state_at(double t, std::span<double> x, std::span<double> v) const;

 private:
  std::span<const double> row(const std::vector<double>& flat, std::size_t i) const {
    return {flat.data() + i * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }

  SamplerKind sampler_ = SamplerKind::zigzag;
  int d_ = 0;
  Domain domain_ = Domain::euclidean;
  std::shared_ptr<const Flow> flow_;
  Eigen::VectorXd x0_;
  Eigen::VectorXd v0_;
  std::vector<double> times_;
  std::vector<EventKind> kinds_;
  std::vector<int> channels_;
  std::vector<double> xs_;
  std::vector<double> vb_;
  std::vector<double> va_;
};

struct SkeletonCheck {
  bool ok = true;
  std::string first_failure;
};

/// Structural invariants: increasing times, segment consistency with the flow,
/// norm-preserving bounces, and x unchanged at refreshes.
SkeletonCheck validate_skeleton(const EventSkeleton& skeleton, double tol = 1e-9);

}  // namespace pdmpkit
