#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include "curex/evt.hpp"
#include "curex/io.hpp"
#include "curex/rng.hpp"
#include "curex/simulation.hpp"
#include "curex/survival.hpp"
#include "curex/variance.hpp"
#include "support/stats.hpp"

using namespace curex;

namespace {

// Seed for the bundled desk-scale study (criteria 4, 7, 8).
constexpr std::uint64_t kAcceptanceSeed = 1;

std::string fmt(double value) {
  std::ostringstream out;
  out.precision(4);
  out << value;
  return out.str();
}

struct DeskRun {
  ExperimentConfig cfg;
  std::vector<CurvePoint> curve;
  Eigen::VectorXd censoring_sd;  // per ratio, across replications
};

// Shared bias/censoring/MSE study: Pareto susceptibles (gamma = 1), p = 0.5,
// 5% censoring atom, n = 1000, 50 replications, 100 bootstrap resamples,
// follow-up ratios 0.4/0.6/0.8/1.0.
const DeskRun& desk_run() {
  static const DeskRun run = [] {
    DeskRun out;
    out.cfg.model = SimModel::gpd(1.0);
    out.cfg.p = 0.5;
    out.cfg.epsilon = 0.05;
    out.cfg.n = 1000;
    out.cfg.N = 50;
    out.cfg.N_b = 100;
    out.cfg.grid_ratios = Eigen::Vector4d(0.4, 0.6, 0.8, 1.0);
    out.cfg.seed = kAcceptanceSeed;
    out.curve = run_experiment(out.cfg);

    // Replay the per-replication datasets (same key schedule) to recover the
    // spread of the censoring proportions behind the curve means.
    const double tau_95 = quantile_susceptible(out.cfg.model, 0.95);
    const RngKey root = RngKey::from_seed(out.cfg.seed);
    out.censoring_sd.resize(out.cfg.grid_ratios.size());
    for (Eigen::Index k = 0; k < out.cfg.grid_ratios.size(); ++k) {
      Eigen::VectorXd values(out.cfg.N);
      for (int j = 0; j < out.cfg.N; ++j) {
        RngStream stream(root.child(static_cast<std::uint64_t>(k))
                             .child(static_cast<std::uint64_t>(j)));
        const GeneratedData data =
            gen_dataset(out.cfg.model, out.cfg.p, out.cfg.grid_ratios(k) * tau_95,
                        out.cfg.epsilon, out.cfg.n, stream);
        values(j) = censoring_proportion(data.sample);
      }
      out.censoring_sd(k) = std::sqrt((values.array() - values.mean()).square().sum() /
                                      (out.cfg.N - 1));
    }
    return out;
  }();
  return run;
}

bool criterion_1(std::string& detail) {
  double worst = 0.0;
  int points = 0;
  for (const double gamma : {0.5, 1.0, 1.5}) {
    for (const double p : {0.25, 0.5, 0.75}) {
      for (const double y : {0.5, 0.7, 0.9}) {
        for (const double tau_c : {5.0, 10.0, 50.0}) {
          if (y * y * tau_c < 1.0) continue;  // keep all points inside the support
          auto F = [&](double t) {
            return t <= 1.0 ? 0.0 : p * (1.0 - std::pow(t, -1.0 / gamma));
          };
          worst = std::max(worst, std::abs(p_y_true(F, y, tau_c) - p));
          ++points;
        }
      }
    }
  }
  detail = "max |p_y - p| = " + fmt(worst) + " over " + std::to_string(points) +
           " exact-Pareto grid points (tolerance 1e-10)";
  return worst <= 1e-10;
}

bool criterion_2(std::string& detail) {
  double worst = 0.0;
  int patterns = 0;
  for (int n = 1; n <= 6; ++n) {
    std::vector<double> time(n);
    for (int i = 0; i < n; ++i) time[i] = i + 1.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::vector<int> event(n);
      std::vector<Observation> raw(n);
      for (int i = 0; i < n; ++i) {
        event[i] = (mask >> i) & 1u;
        raw[i] = {time[i], event[i] == 1};
      }
      const StepCurve curve = kaplan_meier(build_sample(raw));
      for (double t = 0.5; t <= n + 0.5; t += 0.5) {
        worst = std::max(worst, std::abs(evaluate(curve, t) -
                                         test_support::km_brute_force(time, event, t)));
      }
      ++patterns;
    }
  }
  detail = "max |KM - brute force| = " + fmt(worst) + " over " +
           std::to_string(patterns) + " censoring patterns, n <= 6 (tolerance 1e-12)";
  return worst <= 1e-12;
}

bool criterion_3(std::string& detail) {
  const CorrectedEstimate r = corrected_estimate({0.6, 0.5, 0.3, 0.8});
  detail = "correction of (0.6, 0.5, 0.3): tail ratio = " + fmt(r.y_gamma_hat) +
           ", corrected value = " + fmt(r.p_hat_y) + " (want 2 and 0.7)";
  return !r.fallback_used && std::abs(r.y_gamma_hat - 2.0) <= 1e-12 &&
         std::abs(r.p_hat_y - 0.7) <= 1e-12;
}

bool criterion_4(std::string& detail) {
  const DeskRun& run = desk_run();
  bool pass = true;
  std::string parts;
  for (const CurvePoint& point : run.curve) {
    const double bias_star = std::abs(point.mean_p_star - run.cfg.p);
    const double bias_plateau = std::abs(point.mean_p_n - run.cfg.p);
    if (point.ratio >= 0.6 && !(bias_star < bias_plateau)) pass = false;
    if (point.ratio >= 0.8 && !(bias_star <= 0.05)) pass = false;
    if (!parts.empty()) parts += ", ";
    parts += "r=" + fmt(point.ratio) + ": |bias*|=" + fmt(bias_star) +
             " vs |bias_n|=" + fmt(bias_plateau);
  }
  detail = "selected-y estimator vs plateau (n=1000, N=50): " + parts;
  return pass;
}

bool criterion_5(std::string& detail) {
  // Fixed y = 0.7 at follow-up ratio 0.8 (tau_c = 15.2), n = 5000, N = 500:
  // the empirical variance of sqrt(n)(p_hat_y - p_y) must sit within 20% of
  // the exact asymptotic variance and of the mean plug-in, and standardized
  // residuals must look normal at the 1% level.
  const SimModel model = SimModel::gpd(1.0);
  const double p = 0.5;
  const double epsilon = 0.05;
  const double tau_c = 0.8 * quantile_susceptible(model, 0.95);
  const double y = 0.7;
  const int n = 5000;
  const int N = 500;

  auto F = [&](double t) { return p * cdf_susceptible(model, t); };
  auto density = [&](double t) {
    const double u = 1.0 + t;
    return p / (u * u);
  };
  auto F_c_left = [&](double t) {
    return (1.0 - epsilon) * std::clamp(t, 0.0, tau_c) / tau_c;
  };
  const double target = p_y_true(F, y, tau_c);
  const VarianceBreakdown exact = sigma2_exact(F, density, F_c_left, y, tau_c);

  const RngKey root = RngKey::from_seed(kAcceptanceSeed);
  Eigen::VectorXd scaled_error(N);
  double plugin_sum = 0.0;
  int plugin_count = 0;
  for (int j = 0; j < N; ++j) {
    RngStream stream(root.child(static_cast<std::uint64_t>(j)));
    const GeneratedData data = gen_dataset(model, p, tau_c, epsilon, n, stream);
    const CorrectedEstimate estimate = p_hat_y_from_sample(data.sample, y);
    scaled_error(j) = std::sqrt(static_cast<double>(n)) * (estimate.p_hat_y - target);
    try {
      plugin_sum += sigma2_plugin(data.sample, y).sigma2;
      ++plugin_count;
    } catch (const EstimationError&) {
    }
  }
  const double empirical =
      (scaled_error.array() - scaled_error.mean()).square().sum() / (N - 1);
  const double mean_plugin = plugin_count > 0 ? plugin_sum / plugin_count : 0.0;

  const double sigma = std::sqrt(exact.sigma2);
  std::vector<double> standardized(N);
  for (int j = 0; j < N; ++j) standardized[j] = scaled_error(j) / sigma;
  const double ks =
      test_support::ks_statistic(standardized, test_support::normal_cdf);
  const double ks_p = test_support::ks_p_value(ks, N);

  const double vs_exact = std::abs(empirical - exact.sigma2) / exact.sigma2;
  const double vs_plugin = mean_plugin > 0.0
                               ? std::abs(empirical - mean_plugin) / mean_plugin
                               : 1.0;
  const bool pass = vs_exact <= 0.20 && vs_plugin <= 0.20 && ks_p >= 0.01;
  detail = "empirical var " + fmt(empirical) + " vs exact " + fmt(exact.sigma2) +
           " (rel " + fmt(vs_exact) + ") and mean plug-in " + fmt(mean_plugin) +
           " (rel " + fmt(vs_plugin) + "); KS p = " + fmt(ks_p) +
           " (need rel <= 0.2 and p >= 0.01)";
  return pass;
}

void criterion_5_info() {
  // Not part of the pass/fail decision: the same comparison far into the
  // asymptotic regime, where the delta-method linearization is accurate.
  const SimModel model = SimModel::gpd(1.0);
  const double p = 0.5;
  const double epsilon = 0.05;
  const double tau_c = 0.8 * quantile_susceptible(model, 0.95);
  const double y = 0.7;
  const int N = 600;
  auto F = [&](double t) { return p * cdf_susceptible(model, t); };
  auto density = [&](double t) {
    const double u = 1.0 + t;
    return p / (u * u);
  };
  auto F_c_left = [&](double t) {
    return (1.0 - epsilon) * std::clamp(t, 0.0, tau_c) / tau_c;
  };
  const double target = p_y_true(F, y, tau_c);
  const double sigma2 = sigma2_exact(F, density, F_c_left, y, tau_c).sigma2;
  const std::array<int, 2> sizes = {50000, 300000};
  std::array<double, 2> ratio{};
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    const int n = sizes[s];
    const RngKey root = RngKey::from_seed(kAcceptanceSeed + 5 + s);
    Eigen::VectorXd scaled_error(N);
    for (int j = 0; j < N; ++j) {
      RngStream stream(root.child(static_cast<std::uint64_t>(j)));
      const GeneratedData data = gen_dataset(model, p, tau_c, epsilon, n, stream);
      scaled_error(j) = std::sqrt(static_cast<double>(n)) *
                        (p_hat_y_from_sample(data.sample, y).p_hat_y - target);
    }
    const double empirical =
        (scaled_error.array() - scaled_error.mean()).square().sum() / (N - 1);
    ratio[s] = empirical / sigma2;
  }
  std::cout << "CRITERION 5 INFO (non-gating): with N = " << N
            << " the empirical/exact variance ratio is " << fmt(ratio[0])
            << " at n = " << sizes[0] << " and " << fmt(ratio[1])
            << " at n = " << sizes[1]
            << "; at n = 5000 the correction denominator ("
            << fmt(F(y * y * tau_c) - 2.0 * F(y * tau_c) + F(tau_c))
            << ") is smaller than its own sampling noise, so the scaled errors"
            << " are far from their limiting distribution.\n";
}

bool criterion_6(std::string& detail) {
  // Bounded susceptibles (Beta(1, 10/7), endpoint 1) under sufficient
  // follow-up: uniform censoring on [0, 1.2].
  const SimModel model = SimModel::beta(10.0 / 7.0);
  const RngKey root = RngKey::from_seed(kAcceptanceSeed);
  int within = 0;
  const int N = 100;
  for (int j = 0; j < N; ++j) {
    RngStream stream(root.child(static_cast<std::uint64_t>(j)));
    const GeneratedData data = gen_dataset(model, 0.5, 1.2, 0.0, 10000, stream);
    if (std::abs(plateau_estimate(data.sample) - 0.5) < 0.03) ++within;
  }
  detail = "plateau within 0.03 of p in " + std::to_string(within) + "/" +
           std::to_string(N) + " replications (need >= 95)";
  return within >= 95;
}

bool criterion_7(std::string& detail) {
  const DeskRun& run = desk_run();
  bool pass = true;
  double low = 1.0;
  double high = 0.0;
  double worst_margin = 1.0;
  for (Eigen::Index k = 0; k < run.cfg.grid_ratios.size(); ++k) {
    const CurvePoint& point = run.curve[static_cast<std::size_t>(k)];
    if (point.ratio < 0.4) continue;
    low = std::min(low, point.censoring_prop);
    high = std::max(high, point.censoring_prop);
    if (!(point.censoring_prop >= 0.35 && point.censoring_prop <= 0.90)) pass = false;
    const double se = run.censoring_sd(k) / std::sqrt(static_cast<double>(run.cfg.N));
    const double margin =
        point.censoring_prop - ((1.0 - run.cfg.p) - 3.0 * se);
    worst_margin = std::min(worst_margin, margin);
    if (margin < 0.0) pass = false;
  }
  detail = "mean censoring in [" + fmt(low) + ", " + fmt(high) +
           "] (band [0.35, 0.90]); min margin over 1-p - 3 SE = " + fmt(worst_margin);
  return pass;
}

bool criterion_8(std::string& detail) {
  const DeskRun& run = desk_run();
  const std::size_t count = run.curve.size();
  bool pass = true;
  std::string parts;
  for (std::size_t k = count - 2; k < count; ++k) {
    const CurvePoint& point = run.curve[k];
    if (!(point.mse_p_star <= point.mse_p_n)) pass = false;
    if (!parts.empty()) parts += ", ";
    parts += "r=" + fmt(point.ratio) + ": MSE*=" + fmt(point.mse_p_star) +
             " vs MSE_n=" + fmt(point.mse_p_n);
  }
  detail = "selected-y MSE vs plateau MSE at the two largest ratios: " + parts;
  return pass;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool criterion_9(std::string& detail) {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "curex-acceptance";
  fs::remove_all(base);

  // Simulation pipeline: identical configs into two directories.
  const std::string config =
      "model = gpd(1)\nn = 120\nN = 4\nN_b = 10\ngrid_ratios = 0.4, 0.8\nseed = 7\n";
  SimulateRequest request = parse_simulate_config(config, {}, base / "a");
  const std::vector<fs::path> first = run_simulate(request);
  request.out_dir = base / "b";
  const std::vector<fs::path> second = run_simulate(request);
  bool same = first.size() == second.size();
  for (std::size_t i = 0; same && i < first.size(); ++i) {
    same = slurp(first[i]) == slurp(second[i]);
  }

  // Analysis pipeline: same request twice.
  fs::create_directories(base);
  const fs::path csv_path = base / "sample.csv";
  {
    RngStream stream(RngKey::from_seed(3));
    const GeneratedData data =
        gen_dataset(SimModel::gpd(1.0), 0.5, 15.2, 0.05, 400, stream);
    std::ofstream out(csv_path);
    out << "time,status\n";
    for (Eigen::Index i = 0; i < data.sample.size(); ++i) {
      out << format_double(data.sample.time(i)) << ',' << data.sample.event(i)
          << '\n';
    }
  }
  AnalysisRequest analysis;
  analysis.input_path = csv_path;
  analysis.n_bootstrap = 50;
  analysis.seed = 7;
  const std::string report_a = report_to_json(analyze(analysis));
  const std::string report_b = report_to_json(analyze(analysis));
  const bool reports_same = report_a == report_b;

  detail = std::string("simulation rerun byte-identical: ") +
           (same ? "yes" : "NO") +
           "; analysis rerun byte-identical: " + (reports_same ? "yes" : "NO");
  return same && reports_same;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite for the cure-rate estimation library"};
  int criterion = 0;
  app.add_option("--criterion", criterion, "Run a single criterion (1-9; 0 = all)")
      ->check(CLI::Range(0, 9));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<bool(std::string&)>> criteria = {
      criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
      criterion_6, criterion_7, criterion_8, criterion_9};

  bool all_pass = true;
  for (int k = 1; k <= 9; ++k) {
    if (criterion != 0 && criterion != k) continue;
    std::string detail;
    bool pass = false;
    try {
      pass = criteria[static_cast<std::size_t>(k - 1)](detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::cout << "CRITERION " << k << ": " << (pass ? "PASS" : "FAIL") << " - "
              << detail << '\n';
    if (k == 5) criterion_5_info();
    if (!pass) all_pass = false;
  }
  return all_pass ? 0 : 1;
}
