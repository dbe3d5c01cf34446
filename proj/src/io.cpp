#include "curex/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace curex {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t");
  if (begin == std::string::npos) return {};
  const auto end = text.find_last_not_of(" \t");
  return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& line, char separator) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(separator, start);
    if (pos == std::string::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

bool parse_double(const std::string& text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto result = std::from_chars(begin, end, out);
  return result.ec == std::errc() && result.ptr == end;
}

bool parse_uint64(const std::string& text, std::uint64_t& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto result = std::from_chars(begin, end, out);
  return result.ec == std::errc() && result.ptr == end;
}

bool parse_int(const std::string& text, int& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto result = std::from_chars(begin, end, out);
  return result.ec == std::errc() && result.ptr == end;
}

std::string strip_carriage_return(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // field lists
  std::vector<std::size_t> line_numbers;       // 1-based source lines
};

CsvTable read_csv_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw FileNotFound(path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw MalformedHeader("file is empty");
  table.header = split(strip_carriage_return(line), ',');
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    line = strip_carriage_return(line);
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split(line, ',');
    if (fields.size() != table.header.size()) {
      throw BadRow(line_number, "expected " + std::to_string(table.header.size()) +
                                    " fields, got " + std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(line_number);
  }
  return table;
}

std::size_t column_index(const CsvTable& table, const std::string& name) {
  const auto it = std::find(table.header.begin(), table.header.end(), name);
  if (it == table.header.end()) {
    throw MalformedHeader("missing '" + name + "' column");
  }
  return static_cast<std::size_t>(it - table.header.begin());
}

double parse_time_field(const std::string& text, std::size_t line_number) {
  double value = 0.0;
  if (!parse_double(text, value)) {
    throw BadRow(line_number, "invalid time '" + text + "'");
  }
  if (!std::isfinite(value)) throw BadRow(line_number, "non-finite time");
  if (value < 0.0) throw BadRow(line_number, "negative time");
  return value;
}

bool parse_status_field(const std::string& text, std::size_t line_number) {
  if (text == "0") return false;
  if (text == "1") return true;
  throw BadRow(line_number, "status must be 0 or 1, got '" + text + "'");
}

ordered_json group_to_json(const GroupReport& group) {
  ordered_json j;
  j["label"] = group.label;
  j["n"] = group.n;
  j["n_events"] = group.n_events;
  j["censoring_prop"] = group.censoring_prop;
  j["p_hat_n"] = group.p_hat_n;
  j["y_star"] = group.y_star;
  j["p_hat_y_star"] = group.p_hat_y_star;
  j["p_hat_y_star_clamped"] = group.p_hat_y_star_clamped;
  j["fallback_used"] = group.fallback_used;
  j["sigma2"] = group.sigma2;
  j["ci_lower"] = group.ci_lower;
  j["ci_upper"] = group.ci_upper;
  j["cure_rate_plateau"] = group.cure_rate_plateau;
  j["cure_rate_corrected"] = group.cure_rate_corrected;
  return j;
}

ordered_json vector_to_json(const Eigen::VectorXd& values) {
  ordered_json j = ordered_json::array();
  for (Eigen::Index i = 0; i < values.size(); ++i) j.push_back(values(i));
  return j;
}

Eigen::VectorXd parse_double_list(const std::string& text, const std::string& key) {
  const std::vector<std::string> parts = split(text, ',');
  Eigen::VectorXd values(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    double value = 0.0;
    if (!parse_double(parts[i], value)) throw BadConfig(key);
    values(i) = value;
  }
  return values;
}

SimModel parse_model_spec(const std::string& text) {
  const std::string spec = trim(text);
  try {
    if (spec == "halfcauchy") return SimModel::half_cauchy();
    if (spec.starts_with("gpd(") && spec.ends_with(")")) {
      double gamma = 0.0;
      if (!parse_double(trim(spec.substr(4, spec.size() - 5)), gamma)) {
        throw BadConfig("model");
      }
      return SimModel::gpd(gamma);
    }
    if (spec.starts_with("beta(") && spec.ends_with(")")) {
      double mu = 0.0;
      if (!parse_double(trim(spec.substr(5, spec.size() - 6)), mu)) {
        throw BadConfig("model");
      }
      return SimModel::beta(mu);
    }
  } catch (const BadConfig&) {
    throw;
  } catch (const InputError&) {
    throw BadConfig("model");
  }
  throw BadConfig("model");
}

}  // namespace

std::string format_double(double value) {
  char buffer[32];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

std::map<std::string, SurvivalSample> read_survival_csv(
    const std::filesystem::path& path,
    const std::optional<std::string>& group_column) {
  const CsvTable table = read_csv_table(path);
  const std::size_t time_index = column_index(table, "time");
  const std::size_t status_index = column_index(table, "status");
  std::size_t group_index = 0;
  if (group_column) group_index = column_index(table, *group_column);

  std::vector<Observation> all;
  std::map<std::string, std::vector<Observation>> by_group;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::size_t line_number = table.line_numbers[r];
    const std::vector<std::string>& fields = table.rows[r];
    const Observation obs{parse_time_field(fields[time_index], line_number),
                          parse_status_field(fields[status_index], line_number)};
    all.push_back(obs);
    if (group_column) {
      const std::string& label = fields[group_index];
      if (label == "All") {
        throw BadRow(line_number, "group label 'All' is reserved");
      }
      by_group[label].push_back(obs);
    }
  }
  if (all.empty()) throw EmptyGroup("All");

  std::map<std::string, SurvivalSample> samples;
  samples.emplace("All", build_sample(all));
  for (const auto& [label, observations] : by_group) {
    samples.emplace(label, build_sample(observations));
  }
  return samples;
}

AnalysisReport analyze(const AnalysisRequest& request) {
  if (!(request.confidence_level > 0.0 && request.confidence_level < 1.0)) {
    throw BadConfig("level");
  }
  if (request.n_bootstrap <= 0) throw BadConfig("nb");
  const std::map<std::string, SurvivalSample> samples =
      read_survival_csv(request.input_path, request.group_column);

  AnalysisReport report;
  report.input = request.input_path.string();
  report.group_column = request.group_column;
  report.tau0 = request.tau0;
  report.n_bootstrap = request.n_bootstrap;
  report.seed = request.seed;
  report.confidence_level = request.confidence_level;

  std::vector<std::string> labels;
  labels.push_back("All");
  for (const auto& [label, sample] : samples) {
    if (label != "All") labels.push_back(label);
  }

  for (const std::string& label : labels) {
    const SurvivalSample& sample = samples.at(label);
    const SurvivalSample estimation_sample =
        request.tau0 ? psi_transform(sample, *request.tau0) : sample;

    YSelectionConfig selection;
    selection.grid = request.y_grid;
    selection.n_bootstrap = request.n_bootstrap;
    selection.seed = request.seed;
    const YStarResult result = select_y_star(estimation_sample, selection);

    GroupReport group;
    group.label = label;
    group.n = sample.size();
    group.n_events = sample.event.sum();
    group.censoring_prop = censoring_proportion(sample);
    group.p_hat_n = result.p_hat_n;
    group.y_star = result.y_star;
    group.p_hat_y_star = result.estimate.p_hat_y;
    group.p_hat_y_star_clamped = std::clamp(result.estimate.p_hat_y, 0.0, 1.0);
    group.fallback_used = result.estimate.fallback_used;
    try {
      group.sigma2 = sigma2_plugin(estimation_sample, result.y_star).sigma2;
    } catch (const DegenerateDenominator&) {
      group.sigma2 = 0.0;
    }
    const auto [lower, upper] =
        wald_interval(group.p_hat_y_star_clamped, group.sigma2, group.n,
                      request.confidence_level);
    group.ci_lower = lower;
    group.ci_upper = upper;
    group.cure_rate_plateau = 1.0 - group.p_hat_n;
    group.cure_rate_corrected = 1.0 - group.p_hat_y_star_clamped;
    report.groups.push_back(std::move(group));
  }
  return report;
}

std::string report_to_json(const AnalysisReport& report) {
  ordered_json j;
  j["schema_version"] = 1;
  j["input"] = report.input;
  j["group_column"] =
      report.group_column ? ordered_json(*report.group_column) : ordered_json(nullptr);
  j["tau0"] = report.tau0 ? ordered_json(*report.tau0) : ordered_json(nullptr);
  j["n_bootstrap"] = report.n_bootstrap;
  j["seed"] = report.seed;
  j["confidence_level"] = report.confidence_level;
  j["groups"] = ordered_json::array();
  for (const GroupReport& group : report.groups) {
    j["groups"].push_back(group_to_json(group));
  }
  return j.dump(2) + "\n";
}

void write_report_json(const AnalysisReport& report,
                       const std::filesystem::path& out_path) {
  std::ofstream out(out_path);
  if (!out.is_open()) throw InputError("cannot open output file: " + out_path.string());
  out << report_to_json(report);
}

SimulateRequest parse_simulate_config(
    const std::string& config_text,
    const std::vector<std::pair<std::string, std::string>>& overrides,
    const std::filesystem::path& out_dir) {
  static const std::vector<std::string> known_keys = {
      "model", "p", "epsilon", "n", "N", "N_b", "grid_ratios",
      "y_grid", "seed", "apply_psi", "threads", "preset"};

  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream stream(config_text);
  std::string line;
  while (std::getline(stream, line)) {
    line = strip_carriage_return(line);
    const std::size_t comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    if (trim(line).empty()) continue;
    const std::size_t equals = line.find('=');
    if (equals == std::string::npos) throw BadConfig(trim(line));
    entries.emplace_back(trim(line.substr(0, equals)), trim(line.substr(equals + 1)));
  }
  entries.insert(entries.end(), overrides.begin(), overrides.end());

  for (const auto& [key, value] : entries) {
    if (std::find(known_keys.begin(), known_keys.end(), key) == known_keys.end()) {
      throw BadConfig(key);
    }
  }

  SimulateRequest request;
  request.out_dir = out_dir;

  std::string preset;
  for (const auto& [key, value] : entries) {
    if (key == "preset") preset = value;
  }
  if (preset == "desk") {
    request.base.N = 50;
    request.base.N_b = 100;
    request.base.grid_ratios = Eigen::Vector4d(0.4, 0.6, 0.8, 1.0);
  } else if (preset == "full") {
    request.base.N = 200;
    request.base.N_b = 200;
    request.base.grid_ratios = default_ratio_grid();
  } else if (!preset.empty()) {
    throw BadConfig("preset");
  }

  bool model_given = false;
  for (const auto& [key, value] : entries) {
    if (key == "preset") continue;
    if (key == "model") {
      request.models.clear();
      for (const std::string& spec : split(value, ',')) {
        request.models.push_back(parse_model_spec(spec));
      }
      model_given = true;
    } else if (key == "p") {
      const Eigen::VectorXd values = parse_double_list(value, "p");
      request.p_values.assign(values.data(), values.data() + values.size());
      for (const double p : request.p_values) {
        if (!(p > 0.0 && p < 1.0)) throw BadConfig("p");
      }
    } else if (key == "epsilon") {
      if (!parse_double(value, request.base.epsilon) ||
          !(request.base.epsilon >= 0.0 && request.base.epsilon < 1.0)) {
        throw BadConfig("epsilon");
      }
    } else if (key == "n") {
      if (!parse_int(value, request.base.n) || request.base.n <= 0) {
        throw BadConfig("n");
      }
    } else if (key == "N") {
      if (!parse_int(value, request.base.N) || request.base.N <= 0) {
        throw BadConfig("N");
      }
    } else if (key == "N_b") {
      if (!parse_int(value, request.base.N_b) || request.base.N_b <= 0) {
        throw BadConfig("N_b");
      }
    } else if (key == "grid_ratios") {
      request.base.grid_ratios =
          value == "default24" ? default_ratio_grid() : parse_double_list(value, "grid_ratios");
    } else if (key == "y_grid") {
      request.base.y_grid =
          value == "default" ? default_y_grid() : parse_double_list(value, "y_grid");
    } else if (key == "seed") {
      if (!parse_uint64(value, request.base.seed)) throw BadConfig("seed");
      request.seed_given = true;
    } else if (key == "apply_psi") {
      if (value == "true" || value == "1") {
        request.base.apply_psi = true;
      } else if (value == "false" || value == "0") {
        request.base.apply_psi = false;
      } else {
        throw BadConfig("apply_psi");
      }
    } else if (key == "threads") {
      if (!parse_int(value, request.base.threads) || request.base.threads < 0) {
        throw BadConfig("threads");
      }
    }
  }

  if (!model_given) throw BadConfig("model");
  if (request.p_values.empty()) request.p_values.push_back(request.base.p);
  return request;
}

std::vector<std::filesystem::path> run_simulate(const SimulateRequest& request,
                                                const ProgressSink& progress) {
  std::filesystem::create_directories(request.out_dir);
  const RngKey combo_root = RngKey::from_seed(request.base.seed);

  ordered_json manifest;
  manifest["schema_version"] = 1;
  manifest["seed"] = request.base.seed;
  manifest["epsilon"] = request.base.epsilon;
  manifest["n"] = request.base.n;
  manifest["N"] = request.base.N;
  manifest["N_b"] = request.base.N_b;
  manifest["grid_ratios"] = vector_to_json(request.base.grid_ratios);
  manifest["y_grid"] = vector_to_json(request.base.y_grid);
  manifest["apply_psi"] = request.base.apply_psi;
  manifest["threads"] = request.base.threads;
  manifest["combinations"] = ordered_json::array();

  std::vector<std::filesystem::path> written;
  std::uint64_t combo_index = 0;
  for (const SimModel& model : request.models) {
    for (const double p : request.p_values) {
      ExperimentConfig cfg = request.base;
      cfg.model = model;
      cfg.p = p;
      cfg.seed = combo_root.child(combo_index).state;
      const std::vector<CurvePoint> curve = run_experiment(cfg, progress);

      const std::string file_name =
          "curve_" + model.file_tag() + "_p" + format_double(p) + ".csv";
      const std::filesystem::path file_path = request.out_dir / file_name;
      std::ofstream out(file_path);
      if (!out.is_open()) {
        throw InputError("cannot open output file: " + file_path.string());
      }
      out << "ratio,tau_c,mean_p_star,mse_p_star,mean_p_n,mse_p_n,censoring_prop\n";
      for (const CurvePoint& point : curve) {
        out << format_double(point.ratio) << ',' << format_double(point.tau_c) << ','
            << format_double(point.mean_p_star) << ',' << format_double(point.mse_p_star)
            << ',' << format_double(point.mean_p_n) << ',' << format_double(point.mse_p_n)
            << ',' << format_double(point.censoring_prop) << '\n';
      }
      written.push_back(file_path);

      ordered_json combo;
      combo["model"] = model.name();
      combo["p"] = p;
      combo["seed"] = cfg.seed;
      combo["tau_95"] = quantile_susceptible(model, 0.95);
      combo["file"] = file_name;
      manifest["combinations"].push_back(std::move(combo));
      ++combo_index;
    }
  }

  const std::filesystem::path manifest_path = request.out_dir / "manifest.json";
  std::ofstream out(manifest_path);
  if (!out.is_open()) {
    throw InputError("cannot open output file: " + manifest_path.string());
  }
  out << manifest.dump(2) << '\n';
  written.push_back(manifest_path);
  return written;
}

void transform_csv(const std::filesystem::path& input_path, double tau0,
                   const std::filesystem::path& output_path) {
  const CsvTable table = read_csv_table(input_path);
  const std::size_t time_index = column_index(table, "time");
  const std::size_t status_index = column_index(table, "status");

  std::vector<double> times(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    times[r] = parse_time_field(table.rows[r][time_index], table.line_numbers[r]);
    parse_status_field(table.rows[r][status_index], table.line_numbers[r]);
  }
  const std::vector<double> transformed = psi_transform(times, tau0);

  std::ofstream out(output_path);
  if (!out.is_open()) {
    throw InputError("cannot open output file: " + output_path.string());
  }
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    out << table.header[c] << (c + 1 < table.header.size() ? "," : "\n");
  }
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (c == time_index) {
        out << format_double(transformed[r]);
      } else {
        out << table.rows[r][c];
      }
      out << (c + 1 < table.header.size() ? "," : "\n");
    }
  }
}

}  // namespace curex
