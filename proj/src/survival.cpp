#include "curex/survival.hpp"

#include <algorithm>
#include <cmath>

namespace curex {

namespace {

StepCurve product_limit(const SurvivalSample& sample) {
  const Eigen::Index n = sample.size();
  std::vector<double> times;
  std::vector<double> values;
  double survival = 1.0;
  double last_value = 0.0;
  Eigen::Index i = 0;
  while (i < n) {
    const double t = sample.time(i);
    while (i < n && sample.time(i) == t) {
      if (sample.event(i) == 1) {
        survival *= 1.0 - 1.0 / static_cast<double>(n - i);
      }
      ++i;
    }
    const double value = std::clamp(1.0 - survival, 0.0, 1.0);
    if (value != last_value) {
      times.push_back(t);
      values.push_back(value);
      last_value = value;
    }
  }
  StepCurve curve;
  curve.jump_times = Eigen::Map<const Eigen::VectorXd>(times.data(), times.size());
  curve.values = Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
  return curve;
}

Eigen::Index count_jumps_before(const StepCurve& curve, double t, bool strict) {
  const double* begin = curve.jump_times.data();
  const double* end = begin + curve.jump_times.size();
  const double* it = strict ? std::lower_bound(begin, end, t)
                            : std::upper_bound(begin, end, t);
  return it - begin;
}

}  // namespace

SurvivalSample build_sample(const std::vector<Observation>& raw) {
  if (raw.empty()) throw EmptySample();
  for (const Observation& obs : raw) {
    if (!std::isfinite(obs.time)) throw NonFiniteTime();
    if (obs.time < 0.0) throw NegativeTime(obs.time);
  }
  std::vector<Observation> sorted = raw;
  std::sort(sorted.begin(), sorted.end(), observation_before);
  SurvivalSample sample;
  sample.time.resize(sorted.size());
  sample.event.resize(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    sample.time(i) = sorted[i].time;
    sample.event(i) = sorted[i].event ? 1 : 0;
  }
  return sample;
}

StepCurve kaplan_meier(const SurvivalSample& sample) { return product_limit(sample); }

StepCurve censoring_km(const SurvivalSample& sample) {
  std::vector<Observation> flipped(sample.size());
  for (Eigen::Index i = 0; i < sample.size(); ++i) {
    flipped[i] = {sample.time(i), sample.event(i) == 0};
  }
  return product_limit(build_sample(flipped));
}

double evaluate(const StepCurve& curve, double t) {
  const Eigen::Index k = count_jumps_before(curve, t, /*strict=*/false);
  return k == 0 ? curve.baseline : curve.values(k - 1);
}

double evaluate_left(const StepCurve& curve, double t) {
  const Eigen::Index k = count_jumps_before(curve, t, /*strict=*/true);
  return k == 0 ? curve.baseline : curve.values(k - 1);
}

double curve_plateau(const StepCurve& curve) {
  return curve.values.size() == 0 ? curve.baseline
                                  : curve.values(curve.values.size() - 1);
}

double plateau_estimate(const SurvivalSample& sample) {
  return curve_plateau(kaplan_meier(sample));
}

double censoring_proportion(const SurvivalSample& sample) {
  return 1.0 - sample.event.cast<double>().mean();
}

}  // namespace curex
