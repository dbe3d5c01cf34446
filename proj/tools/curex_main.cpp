#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "curex/io.hpp"

namespace {

std::uint64_t default_seed() {
  const char* env = std::getenv("CUREX_SEED");
  if (env == nullptr) return 1;
  std::uint64_t value = 0;
  const std::string text(env);
  std::size_t consumed = 0;
  try {
    value = std::stoull(text, &consumed);
  } catch (const std::exception&) {
    throw curex::BadConfig("CUREX_SEED");
  }
  if (consumed != text.size()) throw curex::BadConfig("CUREX_SEED");
  return value;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw curex::FileNotFound(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int run(int argc, char** argv) {
  CLI::App app{"Cure-rate estimation from right-censored survival data"};
  app.require_subcommand(1);

  // analyze
  auto* analyze_cmd =
      app.add_subcommand("analyze", "Estimate cure rates from a survival CSV");
  std::string analyze_input;
  std::string analyze_group;
  double analyze_tau0 = 0.0;
  int analyze_nb = 200;
  std::uint64_t analyze_seed = 0;
  double analyze_level = 0.95;
  std::string analyze_out;
  analyze_cmd->add_option("--input", analyze_input, "Input CSV path")->required();
  auto* group_option = analyze_cmd->add_option("--group", analyze_group,
                                               "Group column for subgroup analysis");
  auto* tau0_option = analyze_cmd->add_option(
      "--tau0", analyze_tau0, "Known support endpoint enabling the time transform");
  analyze_cmd->add_option("--nb", analyze_nb, "Bootstrap resample count");
  auto* analyze_seed_option =
      analyze_cmd->add_option("--seed", analyze_seed, "Random seed");
  analyze_cmd->add_option("--level", analyze_level, "Confidence level");
  analyze_cmd->add_option("--out", analyze_out, "Output JSON path")->required();

  // simulate
  auto* simulate_cmd =
      app.add_subcommand("simulate", "Run the Monte Carlo experiment grid");
  std::string config_path;
  std::string out_dir;
  simulate_cmd->add_option("--config", config_path, "Flat key=value configuration file");
  simulate_cmd->add_option("--out-dir", out_dir, "Output directory")->required();
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string override_preset, override_model, override_p, override_epsilon;
  std::string override_n, override_N, override_nb, override_ratios, override_ygrid;
  std::string override_seed, override_psi, override_threads;
  simulate_cmd->add_option("--preset", override_preset, "desk or full");
  simulate_cmd->add_option("--model", override_model,
                           "Model list: gpd(<gamma>), halfcauchy, beta(<mu>)");
  simulate_cmd->add_option("--p", override_p, "Susceptible fractions");
  simulate_cmd->add_option("--epsilon", override_epsilon, "Censoring atom mass");
  simulate_cmd->add_option("--n", override_n, "Sample size");
  simulate_cmd->add_option("--N", override_N, "Replication count");
  simulate_cmd->add_option("--nb", override_nb, "Bootstrap resample count");
  simulate_cmd->add_option("--ratios", override_ratios,
                           "Ratio grid values or default24");
  simulate_cmd->add_option("--ygrid", override_ygrid, "y grid values or default");
  simulate_cmd->add_option("--seed", override_seed, "Random seed");
  simulate_cmd->add_option("--apply-psi", override_psi,
                           "Transform negative-index data (true/false)");
  simulate_cmd->add_option("--threads", override_threads, "Worker threads (0 = auto)");
  bool quiet = false;
  simulate_cmd->add_flag("--quiet", quiet, "Suppress progress output");

  // transform
  auto* transform_cmd =
      app.add_subcommand("transform", "Endpoint-transform the time column");
  std::string transform_input;
  double transform_tau0 = 0.0;
  std::string transform_out;
  transform_cmd->add_option("--input", transform_input, "Input CSV path")->required();
  transform_cmd->add_option("--tau0", transform_tau0, "Known support endpoint")
      ->required();
  transform_cmd->add_option("--out", transform_out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (analyze_cmd->parsed()) {
    curex::AnalysisRequest request;
    request.input_path = analyze_input;
    if (group_option->count() > 0) request.group_column = analyze_group;
    if (tau0_option->count() > 0) request.tau0 = analyze_tau0;
    request.n_bootstrap = analyze_nb;
    request.seed = analyze_seed_option->count() > 0 ? analyze_seed : default_seed();
    request.confidence_level = analyze_level;
    const curex::AnalysisReport report = curex::analyze(request);
    curex::write_report_json(report, analyze_out);
    for (const curex::GroupReport& group : report.groups) {
      std::cerr << group.label << ": n=" << group.n
                << " cure_rate_corrected=" << curex::format_double(group.cure_rate_corrected)
                << " [" << curex::format_double(1.0 - group.ci_upper) << ", "
                << curex::format_double(1.0 - group.ci_lower) << "]\n";
    }
    return 0;
  }

  if (simulate_cmd->parsed()) {
    const std::string config_text =
        config_path.empty() ? std::string() : read_text_file(config_path);
    auto add_override = [&overrides](const std::string& key, const std::string& value) {
      if (!value.empty()) overrides.emplace_back(key, value);
    };
    add_override("preset", override_preset);
    add_override("model", override_model);
    add_override("p", override_p);
    add_override("epsilon", override_epsilon);
    add_override("n", override_n);
    add_override("N", override_N);
    add_override("N_b", override_nb);
    add_override("grid_ratios", override_ratios);
    add_override("y_grid", override_ygrid);
    add_override("seed", override_seed);
    add_override("apply_psi", override_psi);
    add_override("threads", override_threads);

    curex::SimulateRequest request =
        curex::parse_simulate_config(config_text, overrides, out_dir);
    if (!request.seed_given) request.base.seed = default_seed();
    curex::ProgressSink progress;
    if (!quiet) {
      progress = [](std::size_t done, std::size_t total) {
        if (done == total || done % 50 == 0) {
          std::cerr << "\rreplications " << done << "/" << total << std::flush;
          if (done == total) std::cerr << '\n';
        }
      };
    }
    const auto written = curex::run_simulate(request, progress);
    for (const auto& path : written) std::cerr << "wrote " << path.string() << '\n';
    return 0;
  }

  curex::transform_csv(transform_input, transform_tau0, transform_out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const curex::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const curex::EstimationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
