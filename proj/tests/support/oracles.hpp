#pragma once

// Statistical reference checks shared by the unit tests and the acceptance
// runner. Nothing here calls into the library.

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

/// Asymptotic Kolmogorov critical constant: P(√n·D > c) ≈ alpha.
inline double ks_critical(double alpha) { return std::sqrt(-0.5 * std::log(alpha / 2.0)); }

inline double ks_two_sample_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

/// True when the two samples are compatible at level alpha.
inline bool ks_two_sample_pass(const std::vector<double>& a, const std::vector<double>& b, double alpha,
                               double* statistic = nullptr, double* critical = nullptr) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double d = ks_two_sample_statistic(a, b);
  const double crit = ks_critical(alpha) * std::sqrt((na + nb) / (na * nb));
  if (statistic) *statistic = d;
  if (critical) *critical = crit;
  return d <= crit;
}

inline bool ks_one_sample_pass(std::vector<double> x, const std::function<double(double)>& cdf, double alpha,
                               double* statistic = nullptr) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  if (statistic) *statistic = d;
  return d <= ks_critical(alpha) / std::sqrt(n);
}

struct GofResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

/// Pearson chi-squared test of Exp(rate) with `bins` equiprobable cells.
inline GofResult chi2_exponential(const std::vector<double>& x, double rate, int bins = 20) {
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (double v : x) {
    const double u = 1.0 - std::exp(-rate * v);
    auto k = static_cast<int>(u * bins);
    counts[static_cast<std::size_t>(std::clamp(k, 0, bins - 1))] += 1.0;
  }
  const double expected = static_cast<double>(x.size()) / bins;
  double stat = 0.0;
  for (double c : counts) stat += (c - expected) * (c - expected) / expected;
  const boost::math::chi_squared dist(bins - 1);
  return {stat, boost::math::cdf(boost::math::complement(dist, stat))};
}

/// Batch-means standard error of the mean of a correlated series.
inline double batch_se(const std::vector<double>& x) {
  const std::size_t b = static_cast<std::size_t>(std::sqrt(static_cast<double>(x.size())));
  const std::size_t m = x.size() / b;
  std::vector<double> means(b);
  for (std::size_t k = 0; k < b; ++k) {
    means[k] = std::accumulate(x.begin() + static_cast<long>(k * m), x.begin() + static_cast<long>((k + 1) * m), 0.0) /
               static_cast<double>(m);
  }
  return mean_se(means).se;
}

}  // namespace oracle
