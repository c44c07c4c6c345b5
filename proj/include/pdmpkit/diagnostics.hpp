#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pdmpkit/bounds.hpp"
#include "pdmpkit/samplers.hpp"
#include "pdmpkit/skeleton.hpp"

namespace pdmpkit {

/// Polynomial in x: Σ coeff·Π x_i^{p_i}. Indices are 1-based.
class Polynomial {
 public:
  struct Term {
    double coeff = 1.0;
    std::vector<std::pair<int, int>> factors;  // (index, power)
  };

  explicit Polynomial(int d) : d_(d) {}

  static Polynomial constant(int d, double c);
  /// x_i^power
  static Polynomial coordinate(int d, int i, int power = 1);
  /// scale·xᵀMx
  static Polynomial quadratic_form(const Eigen::MatrixXd& M, double scale = 1.0);

  Polynomial& add(Term term);
  int dim() const { return d_; }
  int degree() const;
  const std::vector<Term>& terms() const { return terms_; }
  double operator()(std::span<const double> x) const;

 private:
  int d_;
  std::vector<Term> terms_;
};

struct PathAverage {
  std::string function;
  double value = 0.0;
  bool exact = false;
  double t_begin = 0.0;
  double horizon = 0.0;
};

/// (1/(T − t_begin))∫ f(X_t) dt, integrated segment by segment in closed form.
/// Requires a linear flow on ℝ^d and deg f ≤ 4.
PathAverage path_average_exact(const EventSkeleton& skeleton, const Polynomial& f, const std::string& name = "f",
                               double t_begin = 0.0);

/// Same average by composite Simpson quadrature with sub-steps ≤ `step`
/// inside each segment. Works for every flow.
PathAverage path_average_quadrature(const EventSkeleton& skeleton,
                                    const std::function<double(std::span<const double>)>& f, double step,
                                    const std::string& name = "f", double t_begin = 0.0);

/// States at t_begin, t_begin + dt, … ≤ horizon.
struct Discretization {
  double dt = 0.0;
  double t_begin = 0.0;
  Eigen::MatrixXd x;  // one row per sample
  Eigen::MatrixXd v;
  std::size_t size() const { return static_cast<std::size_t>(x.rows()); }
};

Discretization discretize(const EventSkeleton& skeleton, double dt, double t_begin = 0.0);

/// Start of the retained window: 0 after an exact start, else fraction·T.
double burn_in_time(const SimulationResult& result, double fraction = 0.1);

/// Integrated autocorrelation time in process-time units, so that
/// Var(time average over T) ≈ tau_hat·Var(f)/T.
struct IactEstimate {
  double tau_hat = 0.0;
  double std_error = 0.0;
  std::string method = "batch_means";
  std::size_t batches = 0;
  std::size_t batch_size = 0;
  double dt = 0.0;
};

IactEstimate iact_batch_means(std::span<const double> series, double dt);

/// Pools per-replica estimates: mean tau, standard error from the replica spread.
IactEstimate combine_iact(const std::vector<IactEstimate>& replicas);

struct LagRow {
  std::size_t lag = 0;
  double autocov = 0.0;
  double std_error = 0.0;
  bool used = false;
};

struct DecayFit {
  double alpha_hat = 0.0;
  double std_error = 0.0;  // least-squares standard error of the slope
  std::size_t lags_used = 0;
  std::vector<LagRow> table;
};

/// Exponential rate fitted to the autocovariance over the leading run of lags
/// where it exceeds three Bartlett standard errors.
DecayFit decay_rate_fit(std::span<const double> series, double dt, std::size_t max_lag);

struct Verdict {
  double tau_hat = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  bool pass = false;
};

/// pass ⇔ tau_hat ≤ 2A/α + 3·std_error.
Verdict compare_to_bound(const IactEstimate& iact, const BoundReport& report);
Verdict compare_to_bound(const IactEstimate& iact, double bound);

}  // namespace pdmpkit
