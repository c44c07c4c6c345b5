#include "pdmpkit/thinning.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pdmpkit/errors.hpp"

namespace pdmpkit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Solve a·s + b·s²/2 = mass for the smallest s ≥ 0 with a ≥ 0; +∞ if none.
double linear_segment_root(double a, double b, double mass) {
  const double disc = a * a + 2.0 * b * mass;
  if (disc < 0.0) return kInf;
  const double denom = a + std::sqrt(disc);
  if (denom <= 0.0) return kInf;
  return 2.0 * mass / denom;
}

}  // namespace

PiecewiseLinearBound::PiecewiseLinearBound(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  if (knots_.size() < 2 || knots_.size() != values_.size()) {
    throw ValidationError("piecewise-linear bound needs at least two knots with matching values");
  }
  if (knots_.front() != 0.0) throw ValidationError("piecewise-linear bound must start at t = 0");
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i] > knots_[i - 1])) throw ValidationError("bound knots must be strictly increasing");
  }
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("bound values must be finite and non-negative");
  }
}

PiecewiseLinearBound PiecewiseLinearBound::affine(double a, double b, double h) {
  return PiecewiseLinearBound({0.0, h}, {a, a + b * h});
}

double PiecewiseLinearBound::operator()(double t) const {
  if (t <= 0.0) return values_.front();
  if (t >= knots_.back()) return values_.back();
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - knots_.begin()) - 1;
  const double w = (t - knots_[j]) / (knots_[j + 1] - knots_[j]);
  return values_[j] + w * (values_[j + 1] - values_[j]);
}

std::optional<double> PiecewiseLinearBound::invert(double t, double mass) const {
  if (t >= knots_.back()) return std::nullopt;
  std::size_t j = static_cast<std::size_t>(std::upper_bound(knots_.begin(), knots_.end(), t) - knots_.begin()) - 1;
  double start = t;
  double remaining = mass;
  for (; j + 1 < knots_.size(); ++j) {
    const double slope = (values_[j + 1] - values_[j]) / (knots_[j + 1] - knots_[j]);
    const double a = values_[j] + slope * (start - knots_[j]);
    const double len = knots_[j + 1] - start;
    const double seg_mass = a * len + 0.5 * slope * len * len;
    if (seg_mass >= remaining) {
      const double s = linear_segment_root(a, slope, remaining);
      return start + std::min(s, len);
    }
    remaining -= seg_mass;
    start = knots_[j + 1];
  }
  return std::nullopt;
}

double affine_event_time(double a, double b, double mass) {
  if (b > 0.0) {
    if (a >= 0.0) return linear_segment_root(a, b, mass);
    // Rate is zero until −a/b, then grows linearly.
    return -a / b + std::sqrt(2.0 * mass / b);
  }
  if (b == 0.0) return a > 0.0 ? mass / a : kInf;
  // b < 0: positive part only on [0, a/|b|], total mass a²/(2|b|).
  if (a <= 0.0) return kInf;
  if (mass > a * a / (-2.0 * b)) return kInf;
  return linear_segment_root(a, b, mass);
}

ThinningResult next_event_time(const std::function<double(double)>& rate, const PiecewiseLinearBound& bound,
                               Rng& rng) {
  ThinningResult out;
  double t = 0.0;
  for (;;) {
    const auto cand = bound.invert(t, exponential1(rng));
    if (!cand) return out;
    t = *cand;
    ++out.proposals;
    const double b = bound(t);
    const double r = rate(t);
    if (r - b > 1e-9 * std::max(b, 1.0) || !std::isfinite(r)) {
      std::ostringstream msg;
      msg << "thinning bound violated at t = " << t << ": rate " << r << " > bound " << b;
      throw BoundViolation(msg.str());
    }
    if (b > 0.0 && uniform01(rng) * b < r) {
      out.time = t;
      return out;
    }
    ++out.rejections;
  }
}

}  // namespace pdmpkit
