#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "pdmpkit/random.hpp"

namespace pdmpkit {

/// Non-negative piecewise-linear function on [0, h] given by its knots.
class PiecewiseLinearBound {
 public:
  PiecewiseLinearBound(std::vector<double> knots, std::vector<double> values);
  /// t ↦ a + b·t on [0, h].
  static PiecewiseLinearBound affine(double a, double b, double h);

  double horizon() const { return knots_.back(); }
  double operator()(double t) const;
  /// Smallest s ≥ t with ∫_t^s bound = mass, or nullopt if s would exceed h.
  std::optional<double> invert(double t, double mass) const;

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
};

/// First s with ∫₀ˢ (a + b·u)₊ du = mass; +∞ when the integral never reaches it.
double affine_event_time(double a, double b, double mass);

struct ThinningResult {
  std::optional<double> time;  // nullopt: no event within the lookahead
  int proposals = 0;
  int rejections = 0;
};

/// First arrival on [0, h] of a Poisson process with intensity `rate`, by
/// thinning against `bound`. Throws BoundViolation when rate(t) exceeds
/// bound(t) by more than 1e-9 relative at a proposal.
ThinningResult next_event_time(const std::function<double(double)>& rate, const PiecewiseLinearBound& bound,
                               Rng& rng);

}  // namespace pdmpkit
