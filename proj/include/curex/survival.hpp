#pragma once

#include <Eigen/Dense>
#include <vector>

#include "curex/errors.hpp"

namespace curex {

// One right-censored observation: follow-up time and event indicator
// (true = event observed, false = censored).
struct Observation {
  double time;
  bool event;
};

// Sort order for samples: ascending time, events before censorings at ties.
inline bool observation_before(const Observation& a, const Observation& b) {
  if (a.time != b.time) return a.time < b.time;
  return a.event && !b.event;
}

// Observations sorted ascending by time with events-first tie order.
struct SurvivalSample {
  Eigen::VectorXd time;
  Eigen::VectorXi event;  // 1 = event, 0 = censored

  Eigen::Index size() const { return time.size(); }
  double max_time() const { return time(time.size() - 1); }
};

// Right-continuous nondecreasing step function on [0, inf) with values in
// [0,1]; `values` holds the function value at and after each jump time.
struct StepCurve {
  Eigen::VectorXd jump_times;
  Eigen::VectorXd values;
  double baseline = 0.0;
};

// Validates and sorts raw (time, event) pairs into a SurvivalSample.
SurvivalSample build_sample(const std::vector<Observation>& raw);

// Product-limit estimate of the event-time distribution F.
StepCurve kaplan_meier(const SurvivalSample& sample);

// Product-limit estimate of the censoring distribution, obtained by flipping
// event indicators (which also reverses the tie order).
StepCurve censoring_km(const SurvivalSample& sample);

// Right-continuous evaluation at t.
double evaluate(const StepCurve& curve, double t);

// Left limit at t.
double evaluate_left(const StepCurve& curve, double t);

// Value of the curve at and beyond its last jump.
double curve_plateau(const StepCurve& curve);

// Plateau estimate: Kaplan-Meier value at the largest observed time.
double plateau_estimate(const SurvivalSample& sample);

// Fraction of censored observations.
double censoring_proportion(const SurvivalSample& sample);

}  // namespace curex
