#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "curex/rng.hpp"
#include "curex/survival.hpp"

namespace curex {

// CDF estimate evaluated at tau, y*tau and y^2*tau, with y in (0,1).
struct CorrectionInput {
  double F_at_tau;
  double F_at_y_tau;
  double F_at_y2_tau;
  double y;
};

// Tail-corrected estimate. When the correction degenerates (no usable CDF
// increments, or the tail ratio is 1 or non-finite), p_hat_y falls back to
// the plateau value F_at_tau and fallback_used is set.
struct CorrectedEstimate {
  double p_hat_y;
  double y_gamma_hat;
  bool fallback_used;
};

// Grid of candidate y values: 0.60, 0.62, ..., 0.98.
Eigen::VectorXd default_y_grid();

struct YSelectionConfig {
  Eigen::VectorXd grid = default_y_grid();
  int n_bootstrap = 200;
  std::uint64_t seed = 1;
};

// Endpoint transform x -> 1/(tau0 - x); requires tau0 above every time.
std::vector<double> psi_transform(const std::vector<double>& times, double tau0);
SurvivalSample psi_transform(const SurvivalSample& sample, double tau0);

// Tail ratio y_gamma_hat = (F_y2 - F_y)/(F_y - F_tau) and corrected estimate
// p_hat_y = F_tau + (F_tau - F_y)/(y_gamma_hat - 1). The raw value is kept
// even when it exceeds 1; callers may clamp for presentation.
CorrectedEstimate corrected_estimate(const CorrectionInput& input);

// Evaluates the curve at tau_hat, y*tau_hat, y^2*tau_hat and corrects.
CorrectedEstimate p_hat_y_from_curve(const StepCurve& curve, double tau_hat, double y);
CorrectedEstimate p_hat_y_from_sample(const SurvivalSample& sample, double y);

// Population target of the corrected estimator for a known sub-CDF:
// p_y(tau_c) = F(tau_c) - [F(tau_c)-F(y tau_c)]^2 / [F(y^2 tau_c) - 2F(y tau_c) + F(tau_c)].
double p_y_true(const std::function<double(double)>& F, double y, double tau_c);

// Uniform resample with replacement of size n; preserves sort order and the
// events-first tie order. Deterministic given the stream state.
SurvivalSample bootstrap_resample(const SurvivalSample& sample, RngStream& stream);

struct YStarResult {
  double y_star;
  CorrectedEstimate estimate;  // corrected estimate on the original sample at y_star
  double p_hat_n;              // plateau of the original sample
  double bootstrap_mean;       // mean of the per-resample selected values
};

// Bootstrap selection of y: resample j keeps the largest grid y whose
// corrected estimate exceeds the resample's plateau while remaining a valid
// probability (empty set: the resample contributes its plateau); y_star then
// minimizes |p_hat_y - bootstrap mean| over the grid, ties toward larger y.
// Resample j draws from RngKey::from_seed(cfg.seed).child(j).
YStarResult select_y_star(const SurvivalSample& sample, const YSelectionConfig& cfg);

}  // namespace curex
