#pragma once

// Reference statistics used by the tests: brute-force counterparts of the
// library code plus a one-sample Kolmogorov-Smirnov test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace test_support {

// Product-limit estimate at t computed term by term from unsorted data.
inline double km_brute_force(const std::vector<double>& time,
                             const std::vector<int>& event, double t) {
  std::vector<std::size_t> order(time.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (time[a] != time[b]) return time[a] < time[b];
    return event[a] > event[b];
  });
  const double n = static_cast<double>(time.size());
  double survival = 1.0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const std::size_t i = order[rank];
    if (time[i] > t) break;
    if (event[i] == 1) {
      survival *= 1.0 - 1.0 / (n - static_cast<double>(rank));
    }
  }
  return 1.0 - survival;
}

// Midpoint Riemann sum for integrands without singularities inside [a, b].
inline double riemann(const std::function<double(double)>& f, double a, double b,
                      std::size_t intervals) {
  const double h = (b - a) / static_cast<double>(intervals);
  double sum = 0.0;
  for (std::size_t k = 0; k < intervals; ++k) {
    sum += f(a + (static_cast<double>(k) + 0.5) * h);
  }
  return sum * h;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// One-sample KS statistic against a continuous CDF.
inline double ks_statistic(std::vector<double> sample,
                           const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

// Asymptotic KS p-value via the Kolmogorov series with the small-sample
// adjustment lambda = (sqrt(N) + 0.12 + 0.11 / sqrt(N)) * D.
inline double ks_p_value(double d, std::size_t n) {
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const double lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * std::pow(-1.0, k - 1) *
                        std::exp(-2.0 * lambda * lambda * k * k);
    sum += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::min(1.0, std::max(0.0, sum));
}

inline double sample_mean(const Eigen::VectorXd& x) { return x.mean(); }

inline double sample_variance(const Eigen::VectorXd& x) {
  const double m = x.mean();
  return (x.array() - m).square().sum() / (static_cast<double>(x.size()) - 1.0);
}

}  // namespace test_support
