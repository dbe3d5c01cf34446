#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "curex/evt.hpp"
#include "curex/simulation.hpp"
#include "curex/variance.hpp"

namespace curex {

// Shortest round-trip decimal representation.
std::string format_double(double value);

struct AnalysisRequest {
  std::filesystem::path input_path;
  std::optional<std::string> group_column;
  std::optional<double> tau0;  // enables the endpoint transform
  Eigen::VectorXd y_grid = default_y_grid();
  int n_bootstrap = 200;
  std::uint64_t seed = 1;
  double confidence_level = 0.95;
};

struct GroupReport {
  std::string label;
  std::int64_t n;
  std::int64_t n_events;
  double censoring_prop;
  double p_hat_n;
  double y_star;
  double p_hat_y_star;
  double p_hat_y_star_clamped;
  bool fallback_used;
  double sigma2;
  double ci_lower;
  double ci_upper;
  double cure_rate_plateau;    // 1 - p_hat_n
  double cure_rate_corrected;  // 1 - clamped p_hat_y_star
};

struct AnalysisReport {
  std::string input;
  std::optional<std::string> group_column;
  std::optional<double> tau0;
  int n_bootstrap;
  std::uint64_t seed;
  double confidence_level;
  std::vector<GroupReport> groups;  // "All" first, then labels sorted
};

// Reads a survival CSV (columns `time` and `status`, optional group column)
// into one sample per group label plus an "All" aggregate.
std::map<std::string, SurvivalSample> read_survival_csv(
    const std::filesystem::path& path,
    const std::optional<std::string>& group_column = {});

AnalysisReport analyze(const AnalysisRequest& request);

std::string report_to_json(const AnalysisReport& report);
void write_report_json(const AnalysisReport& report,
                       const std::filesystem::path& out_path);

struct SimulateRequest {
  std::vector<SimModel> models;
  std::vector<double> p_values;
  ExperimentConfig base;  // settings shared by every combination
  bool seed_given = false;
  std::filesystem::path out_dir;
};

// Parses flat `key = value` configuration text, then applies override pairs
// in order (later entries win). Unknown keys raise BadConfig.
SimulateRequest parse_simulate_config(
    const std::string& config_text,
    const std::vector<std::pair<std::string, std::string>>& overrides,
    const std::filesystem::path& out_dir);

// Runs every (model, p) combination, writing one curve CSV each plus a
// manifest.json with the resolved configuration; returns the written paths
// with the manifest last.
std::vector<std::filesystem::path> run_simulate(const SimulateRequest& request,
                                                const ProgressSink& progress = {});

// Applies the endpoint transform to the `time` column, preserving all other
// columns, and writes the result.
void transform_csv(const std::filesystem::path& input_path, double tau0,
                   const std::filesystem::path& output_path);

}  // namespace curex
