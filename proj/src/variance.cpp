#include "curex/variance.hpp"

#include <cmath>

#include "curex/errors.hpp"
#include "curex/quadrature.hpp"

namespace curex {

namespace {

VarianceBreakdown assemble(const Eigen::Vector3d& F_values,
                           const Eigen::Vector3d& v_values) {
  const double F_tau = F_values(0);
  const double F_y = F_values(1);
  const double F_y2 = F_values(2);
  const double denominator = F_y2 - 2.0 * F_y + F_tau;
  if (denominator == 0.0) throw DegenerateDenominator();
  const double b = (F_tau - F_y) / denominator;

  VarianceBreakdown out;
  out.v_values = v_values;
  out.b = b;
  out.a0 = (1.0 - b) * (1.0 - b);
  out.a1 = 2.0 * b * (1.0 - b);
  out.a2 = b * b;

  const Eigen::Vector3d a(out.a0, out.a1, out.a2);
  const Eigen::Vector3d survival = Eigen::Vector3d::Ones() - F_values;
  double sigma2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      sigma2 += a(i) * a(j) * survival(i) * survival(j) * v_values(std::max(i, j));
    }
  }
  out.sigma2 = std::max(sigma2, 0.0);
  return out;
}

}  // namespace

double v_hat(const SurvivalSample& sample, double t, int* dropped_terms) {
  if (t > sample.max_time()) throw PointBeyondData(t);
  const StepCurve censoring = censoring_km(sample);
  const Eigen::Index n = sample.size();
  double survival_before = 1.0;
  double accumulated = 0.0;
  int dropped = 0;
  for (Eigen::Index i = 0; i < n && sample.time(i) <= t; ++i) {
    if (sample.event(i) == 1) {
      const double survival =
          survival_before * (1.0 - 1.0 / static_cast<double>(n - i));
      const double censoring_left = evaluate_left(censoring, sample.time(i));
      const double denominator =
          survival * survival_before * (1.0 - censoring_left);
      if (denominator > 0.0) {
        accumulated += (survival_before - survival) / denominator;
      } else {
        ++dropped;
      }
      survival_before = survival;
    }
  }
  if (dropped_terms != nullptr) *dropped_terms = dropped;
  return accumulated;
}

VarianceBreakdown sigma2_plugin(const SurvivalSample& sample, double y) {
  const StepCurve curve = kaplan_meier(sample);
  const double tau_hat = sample.max_time();
  const Eigen::Vector3d points(tau_hat, y * tau_hat, y * y * tau_hat);
  Eigen::Vector3d F_values;
  Eigen::Vector3d v_values;
  for (int i = 0; i < 3; ++i) {
    F_values(i) = evaluate(curve, points(i));
    v_values(i) = v_hat(sample, points(i));
  }
  return assemble(F_values, v_values);
}

VarianceBreakdown sigma2_exact(const std::function<double(double)>& F,
                               const std::function<double(double)>& density,
                               const std::function<double(double)>& F_c_left,
                               double y, double tau_c) {
  const auto integrand = [&](double s) {
    const double remaining = 1.0 - F(s);
    return density(s) / (remaining * remaining * (1.0 - F_c_left(s)));
  };
  const Eigen::Vector3d points(tau_c, y * tau_c, y * y * tau_c);
  const double piece_low = adaptive_simpson(integrand, 0.0, points(2), 1e-11);
  const double piece_mid = adaptive_simpson(integrand, points(2), points(1), 1e-11);
  const double piece_high = adaptive_simpson(integrand, points(1), points(0), 1e-11);
  const Eigen::Vector3d v_values(piece_low + piece_mid + piece_high,
                                 piece_low + piece_mid, piece_low);
  const Eigen::Vector3d F_values(F(points(0)), F(points(1)), F(points(2)));
  return assemble(F_values, v_values);
}

std::pair<double, double> wald_interval(double p_hat, double sigma2,
                                        std::int64_t n, double level) {
  const double z = normal_quantile(0.5 * (1.0 + level));
  const double half_width = z * std::sqrt(sigma2 / static_cast<double>(n));
  return {std::clamp(p_hat - half_width, 0.0, 1.0),
          std::clamp(p_hat + half_width, 0.0, 1.0)};
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InputError("quantile level must be in (0,1)");
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double numerator =
        q * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                  6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
              1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    const double denominator =
        ((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
             3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
           5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
         4.2313330701600911252e1) * r + 1.0;
    return numerator / denominator;
  }
  double r = std::sqrt(-std::log(std::min(p, 1.0 - p)));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    const double numerator =
        ((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
             2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
           3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
         4.63033784615654529590e0) * r + 1.42343711074968357734e0;
    const double denominator =
        ((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
             1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
           6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
         2.05319162663775882187e0) * r + 1.0;
    value = numerator / denominator;
  } else {
    r -= 5.0;
    const double numerator =
        ((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
             1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
           2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
         5.46378491116411436990e0) * r + 6.65790464350110377720e0;
    const double denominator =
        ((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
             1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
           1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
         5.99832206555887937690e-1) * r + 1.0;
    value = numerator / denominator;
  }
  return p < 0.5 ? -value : value;
}

}  // namespace curex
