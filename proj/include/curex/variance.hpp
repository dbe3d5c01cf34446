#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <utility>

#include "curex/survival.hpp"

namespace curex {

// Asymptotic variance of the corrected estimator at a fixed y, with its
// building blocks: v evaluated at tau, y*tau, y^2*tau (in that order), the
// ratio b, and the delta-method coefficients a0 = (1-b)^2, a1 = 2b(1-b),
// a2 = b^2 (which sum to 1).
struct VarianceBreakdown {
  Eigen::Vector3d v_values;
  double b;
  double a0;
  double a1;
  double a2;
  double sigma2;
};

// Plug-in of the limit-process variance function
// v(t) = integral over (0,t] of dF / [(1-F)(1-F^-)(1-F_c^-)],
// summed over event times; terms with a zero denominator factor are dropped
// and counted in dropped_terms when provided.
double v_hat(const SurvivalSample& sample, double t, int* dropped_terms = nullptr);

// Variance estimate assembled from the Kaplan-Meier curves of the sample.
VarianceBreakdown sigma2_plugin(const SurvivalSample& sample, double y);

// Exact variance from the true distributions: F and its density describe the
// observed event-time sub-CDF, and F_c_left evaluates the censoring CDF left
// limit F_c(t-) so that an atom at tau_c never enters the integrand.
VarianceBreakdown sigma2_exact(const std::function<double(double)>& F,
                               const std::function<double(double)>& density,
                               const std::function<double(double)>& F_c_left,
                               double y, double tau_c);

// p_hat +/- z_{(1+level)/2} * sqrt(sigma2/n), clamped to [0,1].
std::pair<double, double> wald_interval(double p_hat, double sigma2,
                                        std::int64_t n, double level);

// Standard normal quantile (rational approximation, absolute error < 1e-10).
double normal_quantile(double p);

}  // namespace curex
