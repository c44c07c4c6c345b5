#include "pdmpkit/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pdmpkit/errors.hpp"
#include "pdmpkit/simd.hpp"

namespace pdmpkit {

const char* to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::zigzag: return "zigzag";
    case SamplerKind::bps: return "bps";
    case SamplerKind::rhmc: return "rhmc";
  }
  return "unknown";
}

SamplerKind sampler_kind_from_string(const std::string& name) {
  if (name == "zigzag") return SamplerKind::zigzag;
  if (name == "bps") return SamplerKind::bps;
  if (name == "rhmc") return SamplerKind::rhmc;
  throw ValidationError("unknown sampler '" + name + "' (expected zigzag, bps, rhmc)");
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::bounce: return "bounce";
    case EventKind::refresh_full: return "refresh_full";
    case EventKind::refresh_coord: return "refresh_coord";
    case EventKind::end: return "end";
  }
  return "unknown";
}

void LinearFlow::advance(std::span<double> x, std::span<double> v, double t) const {
  simd::axpy(t, v, x);
  if (domain_ == Domain::torus) {
    for (double& xi : x) {
      xi -= std::floor(xi);
      if (xi >= 1.0) xi = 0.0;
    }
  }
}

HarmonicFlow::HarmonicFlow(Eigen::MatrixXd eigenvectors, const Eigen::VectorXd& eigenvalues, double m2)
    : Q_(std::move(eigenvectors)), omega_((m2 * eigenvalues.array()).sqrt().matrix()) {}

void HarmonicFlow::advance(std::span<double> x, std::span<double> v, double t) const {
  const auto d = static_cast<Eigen::Index>(x.size());
  Eigen::Map<Eigen::VectorXd> xm(x.data(), d);
  Eigen::Map<Eigen::VectorXd> vm(v.data(), d);
  const Eigen::VectorXd y = Q_.transpose() * xm;
  const Eigen::VectorXd w = Q_.transpose() * vm;
  Eigen::VectorXd y1(d), w1(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double om = omega_[i];
    const double c = std::cos(om * t);
    const double s = std::sin(om * t);
    y1[i] = y[i] * c + w[i] * s / om;
    w1[i] = -y[i] * om * s + w[i] * c;
  }
  xm = Q_ * y1;
  vm = Q_ * w1;
}

LeapfrogFlow::LeapfrogFlow(TargetModel target, double m2, double step)
    : target_(std::move(target)), m2_(m2), step_(step) {
  if (!(step > 0.0)) throw ValidationError("leapfrog step must be positive");
}

void LeapfrogFlow::kick(std::span<const double> x, std::span<double> v, double h, std::vector<double>& g) const {
  target_.gradient(x, g);
  simd::axpy(-h * m2_, g, v);
}

double LeapfrogFlow::hamiltonian(std::span<const double> x, std::span<const double> v) const {
  return m2_ * target_.value(x) + 0.5 * simd::sum_squares(v);
}

double LeapfrogFlow::advance_tracking_energy(std::span<double> x, std::span<double> v, double t) const {
  std::vector<double> g(x.size());
  const double h0 = hamiltonian(x, v);
  const double scale = std::max(std::abs(h0), 1e-8);
  double worst = 0.0;
  double remaining = t;
  while (remaining > 0.0) {
    const double h = std::min(step_, remaining);
    kick(x, v, 0.5 * h, g);
    simd::axpy(h, v, x);
    kick(x, v, 0.5 * h, g);
    remaining -= h;
    if (remaining < 1e-14 * t) remaining = 0.0;
    worst = std::max(worst, std::abs(hamiltonian(x, v) - h0) / scale);
  }
  return worst;
}

void LeapfrogFlow::advance(std::span<double> x, std::span<double> v, double t) const {
  std::vector<double> g(x.size());
  double remaining = t;
  while (remaining > 0.0) {
    const double h = std::min(step_, remaining);
    kick(x, v, 0.5 * h, g);
    simd::axpy(h, v, x);
    kick(x, v, 0.5 * h, g);
    remaining -= h;
    if (remaining < 1e-14 * t) remaining = 0.0;
  }
}

EventSkeleton::EventSkeleton(SamplerKind sampler, int d, Domain domain, std::shared_ptr<const Flow> flow,
                             Eigen::VectorXd x0, Eigen::VectorXd v0)
    : sampler_(sampler), d_(d), domain_(domain), flow_(std::move(flow)), x0_(std::move(x0)), v0_(std::move(v0)) {}

void EventSkeleton::push(double t, EventKind kind, int channel, std::span<const double> x,
                         std::span<const double> v_before, std::span<const double> v_after) {
  times_.push_back(t);
  kinds_.push_back(kind);
  channels_.push_back(channel);
  xs_.insert(xs_.end(), x.begin(), x.end());
  vb_.insert(vb_.end(), v_before.begin(), v_before.end());
  va_.insert(va_.end(), v_after.begin(), v_after.end());
}

std::array<std::size_t, 4> EventSkeleton::counts() const {
  std::array<std::size_t, 4> c{};
  for (EventKind k : kinds_) ++c[static_cast<std::size_t>(k)];
  return c;
}

void EventSkeleton::state_at(double t, std::span<double> x, std::span<double> v) const {
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  double t0 = 0.0;
  if (it == times_.begin()) {
    std::copy(x0_.data(), x0_.data() + d_, x.begin());
    std::copy(v0_.data(), v0_.data() + d_, v.begin());
  } else {
    const auto i = static_cast<std::size_t>(it - times_.begin()) - 1;
    t0 = times_[i];
    const auto xi = this->x(i);
    const auto vi = v_after(i);
    std::copy(xi.begin(), xi.end(), x.begin());
    std::copy(vi.begin(), vi.end(), v.begin());
  }
  if (t > t0) flow_->advance(x, v, t - t0);
}

namespace {

double coord_distance(double a, double b, Domain domain) {
  double diff = std::abs(a - b);
  if (domain == Domain::torus) diff = std::min(diff, 1.0 - diff);
  return diff;
}

}  // namespace

SkeletonCheck validate_skeleton(const EventSkeleton& sk, double tol) {
  SkeletonCheck out;
  auto fail = [&](std::size_t i, const std::string& what) {
    std::ostringstream msg;
    msg << "event " << i << " (t = " << sk.time(i) << "): " << what;
    out.ok = false;
    out.first_failure = msg.str();
    return out;
  };
  const auto d = static_cast<std::size_t>(sk.dim());
  std::vector<double> x(sk.x0().data(), sk.x0().data() + d);
  std::vector<double> v(sk.v0().data(), sk.v0().data() + d);
  double prev_t = 0.0;
  for (std::size_t i = 0; i < sk.size(); ++i) {
    const double t = sk.time(i);
    if (!(t > prev_t) && !(i == 0 && t >= 0.0)) return fail(i, "event times not strictly increasing");
    sk.flow().advance(x, v, t - prev_t);
    const auto xi = sk.x(i);
    const auto vb = sk.v_before(i);
    const auto va = sk.v_after(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double scale = std::max(1.0, std::abs(xi[j]));
      const double slack = tol * scale + 1e-14 * t * (1.0 + std::abs(v[j]));
      if (coord_distance(x[j], xi[j], sk.domain()) > slack) {
        return fail(i, "position does not match the flow from the previous event");
      }
      if (std::abs(v[j] - vb[j]) > tol * std::max(1.0, std::abs(vb[j]))) {
        return fail(i, "velocity before event does not match the flow");
      }
      if (!std::isfinite(xi[j]) || !std::isfinite(va[j])) return fail(i, "non-finite state");
    }
    if (sk.kind(i) == EventKind::bounce || sk.kind(i) == EventKind::refresh_coord) {
      const double nb = std::sqrt(simd::sum_squares(vb));
      const double na = std::sqrt(simd::sum_squares(va));
      if (std::abs(nb - na) > tol * std::max(1.0, nb)) return fail(i, "bounce changed the speed");
    }
    if (sk.kind(i) == EventKind::end) {
      for (std::size_t j = 0; j < d; ++j) {
        if (va[j] != vb[j]) return fail(i, "end event changed the velocity");
      }
    }
    std::copy(xi.begin(), xi.end(), x.begin());
    std::copy(va.begin(), va.end(), v.begin());
    prev_t = t;
  }
  return out;
}

}  // namespace pdmpkit
