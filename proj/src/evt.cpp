#include "curex/evt.hpp"

#include <cmath>
#include <limits>

namespace curex {

Eigen::VectorXd default_y_grid() {
  Eigen::VectorXd grid(20);
  for (int k = 0; k < 20; ++k) grid(k) = static_cast<double>(60 + 2 * k) / 100.0;
  return grid;
}

std::vector<double> psi_transform(const std::vector<double>& times, double tau0) {
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] < tau0)) throw EndpointNotAbove(tau0, times[i]);
    out[i] = 1.0 / (tau0 - times[i]);
  }
  return out;
}

SurvivalSample psi_transform(const SurvivalSample& sample, double tau0) {
  SurvivalSample out = sample;
  for (Eigen::Index i = 0; i < sample.size(); ++i) {
    if (!(sample.time(i) < tau0)) throw EndpointNotAbove(tau0, sample.time(i));
    out.time(i) = 1.0 / (tau0 - sample.time(i));
  }
  return out;
}

CorrectedEstimate corrected_estimate(const CorrectionInput& input) {
  const double F_tau = input.F_at_tau;
  const double F_y = input.F_at_y_tau;
  const double F_y2 = input.F_at_y2_tau;
  if (F_y == F_tau) {
    return {F_tau, std::numeric_limits<double>::quiet_NaN(), true};
  }
  const double y_gamma = (F_y2 - F_y) / (F_y - F_tau);
  if (F_y2 == F_y || y_gamma == 1.0 || !std::isfinite(y_gamma)) {
    return {F_tau, y_gamma, true};
  }
  return {F_tau + (F_tau - F_y) / (y_gamma - 1.0), y_gamma, false};
}

CorrectedEstimate p_hat_y_from_curve(const StepCurve& curve, double tau_hat, double y) {
  return corrected_estimate({evaluate(curve, tau_hat),
                             evaluate(curve, y * tau_hat),
                             evaluate(curve, y * y * tau_hat), y});
}

CorrectedEstimate p_hat_y_from_sample(const SurvivalSample& sample, double y) {
  return p_hat_y_from_curve(kaplan_meier(sample), sample.max_time(), y);
}

double p_y_true(const std::function<double(double)>& F, double y, double tau_c) {
  const double F_tau = F(tau_c);
  const double F_y = F(y * tau_c);
  const double F_y2 = F(y * y * tau_c);
  const double denominator = F_y2 - 2.0 * F_y + F_tau;
  if (denominator == 0.0) throw DegenerateDenominator();
  const double increment = F_tau - F_y;
  return F_tau - increment * increment / denominator;
}

SurvivalSample bootstrap_resample(const SurvivalSample& sample, RngStream& stream) {
  const Eigen::Index n = sample.size();
  std::vector<int> counts(n, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    ++counts[stream.uniform_int(static_cast<std::uint64_t>(n))];
  }
  SurvivalSample out;
  out.time.resize(n);
  out.event.resize(n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int c = 0; c < counts[i]; ++c) {
      out.time(k) = sample.time(i);
      out.event(k) = sample.event(i);
      ++k;
    }
  }
  return out;
}

YStarResult select_y_star(const SurvivalSample& sample, const YSelectionConfig& cfg) {
  const StepCurve curve = kaplan_meier(sample);
  const double tau_hat = sample.max_time();
  const Eigen::Index G = cfg.grid.size();

  Eigen::VectorXd p_grid(G);
  for (Eigen::Index g = 0; g < G; ++g) {
    p_grid(g) = p_hat_y_from_curve(curve, tau_hat, cfg.grid(g)).p_hat_y;
  }

  const RngKey root = RngKey::from_seed(cfg.seed);
  double total = 0.0;
  for (int j = 0; j < cfg.n_bootstrap; ++j) {
    RngStream stream(root.child(static_cast<std::uint64_t>(j)));
    const SurvivalSample resample = bootstrap_resample(sample, stream);
    const StepCurve boot_curve = kaplan_meier(resample);
    const double boot_tau = resample.max_time();
    const double boot_plateau = curve_plateau(boot_curve);
    double contribution = boot_plateau;
    for (Eigen::Index g = G - 1; g >= 0; --g) {
      const double candidate =
          p_hat_y_from_curve(boot_curve, boot_tau, cfg.grid(g)).p_hat_y;
      if (candidate > boot_plateau && candidate <= 1.0) {
        contribution = candidate;
        break;
      }
    }
    total += contribution;
  }
  const double mean = total / static_cast<double>(cfg.n_bootstrap);

  Eigen::Index best = 0;
  for (Eigen::Index g = 0; g < G; ++g) {
    if (std::abs(p_grid(g) - mean) <= std::abs(p_grid(best) - mean)) best = g;
  }
  return {cfg.grid(best), p_hat_y_from_curve(curve, tau_hat, cfg.grid(best)),
          curve_plateau(curve), mean};
}

}  // namespace curex
