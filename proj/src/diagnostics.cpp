#include "pdmpkit/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "pdmpkit/errors.hpp"
#include "pdmpkit/scaling.hpp"
#include "pdmpkit/simd.hpp"

namespace pdmpkit {

Polynomial Polynomial::constant(int d, double c) {
  Polynomial p(d);
  p.add({c, {}});
  return p;
}

Polynomial Polynomial::coordinate(int d, int i, int power) {
  Polynomial p(d);
  p.add({1.0, {{i, power}}});
  return p;
}

Polynomial Polynomial::quadratic_form(const Eigen::MatrixXd& M, double scale) {
  if (M.rows() != M.cols()) throw ValidationError("quadratic_form needs a square matrix");
  const int d = static_cast<int>(M.rows());
  Polynomial p(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (M(i, j) == 0.0) continue;
      if (i == j) {
        p.add({scale * M(i, i), {{i + 1, 2}}});
      } else {
        p.add({scale * M(i, j), {{i + 1, 1}, {j + 1, 1}}});
      }
    }
  }
  return p;
}

Polynomial& Polynomial::add(Term term) {
  for (const auto& [index, power] : term.factors) {
    if (index < 1 || index > d_) throw ValidationError("polynomial factor index out of range");
    if (power < 0) throw ValidationError("polynomial powers must be non-negative");
  }
  terms_.push_back(std::move(term));
  return *this;
}

int Polynomial::degree() const {
  int deg = 0;
  for (const auto& t : terms_) {
    int td = 0;
    for (const auto& f : t.factors) td += f.second;
    deg = std::max(deg, td);
  }
  return deg;
}

double Polynomial::operator()(std::span<const double> x) const {
  double total = 0.0;
  for (const auto& t : terms_) {
    double prod = t.coeff;
    for (const auto& [index, power] : t.factors) prod *= std::pow(x[static_cast<std::size_t>(index - 1)], power);
    total += prod;
  }
  return total;
}

namespace {

/// Calls visit(start_time, end_time, x, v) for each flow segment, where (x, v)
/// is the state at start_time. Segments are clipped to [t_begin, horizon].
template <class Visit>
void for_each_segment(const EventSkeleton& sk, double t_begin, Visit&& visit) {
  const auto d = static_cast<std::size_t>(sk.dim());
  const double T = sk.horizon();
  std::vector<double> x(d);
  std::vector<double> v(d);
  double start = 0.0;
  std::copy(sk.x0().data(), sk.x0().data() + d, x.begin());
  std::copy(sk.v0().data(), sk.v0().data() + d, v.begin());
  for (std::size_t i = 0; i <= sk.size(); ++i) {
    const double stop = i < sk.size() ? sk.time(i) : T;
    if (stop > t_begin && stop > start) {
      if (start < t_begin) {
        sk.flow().advance(x, v, t_begin - start);
        start = t_begin;
      }
      visit(start, stop, std::span<const double>(x), std::span<const double>(v));
    }
    if (i < sk.size()) {
      start = sk.time(i);
      const auto xi = sk.x(i);
      const auto vi = sk.v_after(i);
      std::copy(xi.begin(), xi.end(), x.begin());
      std::copy(vi.begin(), vi.end(), v.begin());
    }
  }
}

double window_length(const EventSkeleton& sk, double t_begin) {
  const double T = sk.horizon();
  if (!(t_begin >= 0.0) || t_begin >= T) throw ValidationError("path average window is empty");
  return T - t_begin;
}

}  // namespace

PathAverage path_average_exact(const EventSkeleton& sk, const Polynomial& f, const std::string& name,
                               double t_begin) {
  if (!sk.flow().is_linear() || sk.domain() == Domain::torus) {
    throw ValidationError("exact path averages need linear segments on R^d (not RHMC or torus skeletons)");
  }
  if (f.dim() != sk.dim()) throw ValidationError("polynomial dimension does not match the skeleton");
  if (f.degree() > 4) throw ValidationError("exact path averages support polynomials of degree <= 4");
  const double len = window_length(sk, t_begin);

  // Three-point Gauss–Legendre is exact for degree ≤ 5 along x + t·v.
  static const std::array<double, 3> nodes{-0.7745966692414834, 0.0, 0.7745966692414834};
  static const std::array<double, 3> weights{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const auto d = static_cast<std::size_t>(sk.dim());
  std::vector<double> y(d);
  double integral = 0.0;
  for_each_segment(sk, t_begin, [&](double a, double b, std::span<const double> x, std::span<const double> v) {
    const double half = 0.5 * (b - a);
    double seg = 0.0;
    for (std::size_t q = 0; q < 3; ++q) {
      const double s = half * (1.0 + nodes[q]);
      for (std::size_t j = 0; j < d; ++j) y[j] = x[j] + s * v[j];
      seg += weights[q] * f(y);
    }
    integral += half * seg;
  });
  return {name, integral / len, true, t_begin, sk.horizon()};
}

PathAverage path_average_quadrature(const EventSkeleton& sk, const std::function<double(std::span<const double>)>& f,
                                    double step, const std::string& name, double t_begin) {
  if (!(step > 0.0)) throw ValidationError("quadrature step must be positive");
  const double len = window_length(sk, t_begin);
  const auto d = static_cast<std::size_t>(sk.dim());
  std::vector<double> y(d);
  std::vector<double> w(d);
  double integral = 0.0;
  for_each_segment(sk, t_begin, [&](double a, double b, std::span<const double> x, std::span<const double> v) {
    auto n = static_cast<std::size_t>(std::ceil((b - a) / step));
    n = std::max<std::size_t>(2, n + (n % 2));
    const double h = (b - a) / static_cast<double>(n);
    std::copy(x.begin(), x.end(), y.begin());
    std::copy(v.begin(), v.end(), w.begin());
    double seg = f(y);
    for (std::size_t k = 1; k <= n; ++k) {
      sk.flow().advance(y, w, h);
      const double weight = k == n ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
      seg += weight * f(y);
    }
    integral += seg * h / 3.0;
  });
  return {name, integral / len, false, t_begin, sk.horizon()};
}

Discretization discretize(const EventSkeleton& sk, double dt, double t_begin) {
  if (!(dt > 0.0)) throw ValidationError("discretization step must be positive");
  const double T = sk.horizon();
  if (t_begin < 0.0 || t_begin > T) throw ValidationError("discretization start outside [0, T]");
  const auto n = static_cast<std::size_t>(std::floor((T - t_begin) / dt * (1.0 + 1e-12))) + 1;
  const auto d = static_cast<std::size_t>(sk.dim());
  Discretization out;
  out.dt = dt;
  out.t_begin = t_begin;
  out.x.resize(static_cast<Eigen::Index>(n), sk.dim());
  out.v.resize(static_cast<Eigen::Index>(n), sk.dim());

  std::vector<double> x(d);
  std::vector<double> v(d);
  std::size_t next = 0;  // first event strictly after the current sample time
  for (std::size_t j = 0; j < n; ++j) {
    const double t = std::min(T, t_begin + static_cast<double>(j) * dt);
    while (next < sk.size() && sk.time(next) <= t) ++next;
    double t0 = 0.0;
    if (next == 0) {
      std::copy(sk.x0().data(), sk.x0().data() + d, x.begin());
      std::copy(sk.v0().data(), sk.v0().data() + d, v.begin());
    } else {
      t0 = sk.time(next - 1);
      const auto xi = sk.x(next - 1);
      const auto vi = sk.v_after(next - 1);
      std::copy(xi.begin(), xi.end(), x.begin());
      std::copy(vi.begin(), vi.end(), v.begin());
    }
    if (t > t0) sk.flow().advance(x, v, t - t0);
    for (std::size_t k = 0; k < d; ++k) {
      out.x(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = x[k];
      out.v(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = v[k];
    }
  }
  return out;
}

double burn_in_time(const SimulationResult& result, double fraction) {
  if (fraction < 0.0 || fraction >= 1.0) throw ValidationError("burn-in fraction must lie in [0, 1)");
  return result.exact_start ? 0.0 : fraction * result.skeleton.horizon();
}

namespace {

double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double xi : x) s += xi;
  return s / static_cast<double>(x.size());
}

}  // namespace

IactEstimate iact_batch_means(std::span<const double> series, double dt) {
  const std::size_t N = series.size();
  if (N < 400) throw ValidationError("iact_batch_means needs at least 400 samples");
  if (!(dt > 0.0)) throw ValidationError("iact_batch_means needs dt > 0");
  const auto b = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(N))));
  const std::size_t m = N / b;
  const auto used = series.first(b * m);

  const double mu = mean_of(used);
  std::vector<double> centred(used.size());
  for (std::size_t i = 0; i < used.size(); ++i) centred[i] = used[i] - mu;
  const double var = simd::sum_squares(centred) / static_cast<double>(used.size() - 1);
  if (!(var > 0.0) || var <= 1e-28 * std::max(1.0, mu * mu)) throw ZeroVariance("series has zero variance");

  double ss = 0.0;
  for (std::size_t k = 0; k < b; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += centred[k * m + i];
    const double bm = s / static_cast<double>(m);
    ss += bm * bm;
  }
  const double var_bm = ss / static_cast<double>(b - 1);
  IactEstimate est;
  est.tau_hat = dt * static_cast<double>(m) * var_bm / var;
  est.std_error = est.tau_hat * std::sqrt(2.0 / static_cast<double>(b - 1));
  est.batches = b;
  est.batch_size = m;
  est.dt = dt;
  return est;
}

IactEstimate combine_iact(const std::vector<IactEstimate>& replicas) {
  if (replicas.empty()) throw ValidationError("combine_iact needs at least one estimate");
  IactEstimate out = replicas.front();
  if (replicas.size() == 1) return out;
  const auto n = static_cast<double>(replicas.size());
  double mean = 0.0;
  for (const auto& r : replicas) mean += r.tau_hat;
  mean /= n;
  double ss = 0.0;
  for (const auto& r : replicas) ss += (r.tau_hat - mean) * (r.tau_hat - mean);
  out.tau_hat = mean;
  out.std_error = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

DecayFit decay_rate_fit(std::span<const double> series, double dt, std::size_t max_lag) {
  const std::size_t N = series.size();
  if (!(dt > 0.0)) throw ValidationError("decay_rate_fit needs dt > 0");
  if (N < 10) throw InsufficientSignal("series too short for a decay fit");
  max_lag = std::min(max_lag, N - 1);
  const double mu = mean_of(series);
  std::vector<double> c(N);
  for (std::size_t i = 0; i < N; ++i) c[i] = series[i] - mu;
  const double inv_n = 1.0 / static_cast<double>(N);
  const double gamma0 = simd::lagged_product(c, 0) * inv_n;
  if (!(gamma0 > 0.0)) throw ZeroVariance("series has zero variance");

  DecayFit fit;
  double rho_sq_sum = 0.0;  // Σ_{j<k} ρ_j² for Bartlett's formula
  bool contiguous = true;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    LagRow row;
    row.lag = k;
    row.autocov = simd::lagged_product(c, k) * inv_n;
    row.std_error = gamma0 * std::sqrt(inv_n * (1.0 + 2.0 * rho_sq_sum));
    if (contiguous && row.autocov > 3.0 * row.std_error) {
      row.used = true;
      xs.push_back(static_cast<double>(k) * dt);
      ys.push_back(std::log(row.autocov));
    } else {
      contiguous = false;
    }
    const double rho = row.autocov / gamma0;
    rho_sq_sum += rho * rho;
    fit.table.push_back(row);
  }
  fit.lags_used = xs.size();
  if (fit.lags_used < 5) throw InsufficientSignal("fewer than 5 lags with significant autocovariance");

  const double slope = ols_slope(xs, ys);
  double mx = 0.0;
  for (double x : xs) mx += x;
  mx /= static_cast<double>(xs.size());
  double my = 0.0;
  for (double y : ys) my += y;
  my /= static_cast<double>(ys.size());
  double sxx = 0.0;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) sxx += (xs[i] - mx) * (xs[i] - mx);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (my + slope * (xs[i] - mx));
    sse += r * r;
  }
  fit.alpha_hat = -slope;
  fit.std_error = std::sqrt(sse / static_cast<double>(xs.size() - 2) / sxx);
  return fit;
}

Verdict compare_to_bound(const IactEstimate& iact, double bound) {
  Verdict v;
  v.tau_hat = iact.tau_hat;
  v.std_error = iact.std_error;
  v.bound = bound;
  v.ratio = iact.tau_hat / bound;
  v.pass = iact.tau_hat <= bound + 3.0 * iact.std_error;
  return v;
}

Verdict compare_to_bound(const IactEstimate& iact, const BoundReport& report) {
  return compare_to_bound(iact, report.iact_bound);
}

}  // namespace pdmpkit
