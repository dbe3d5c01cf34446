#include "curex/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <mutex>
#include <numbers>
#include <thread>

#include "curex/errors.hpp"

namespace curex {

namespace {

std::string short_double(double v) {
  char buffer[32];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, end);
}

void validate(const ExperimentConfig& cfg) {
  if (!(cfg.p > 0.0 && cfg.p < 1.0)) throw InputError("p must be in (0,1)");
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon < 1.0)) {
    throw InputError("epsilon must be in [0,1)");
  }
  if (cfg.n <= 0 || cfg.N <= 0 || cfg.N_b <= 0) {
    throw InputError("n, N and N_b must be positive");
  }
  if (cfg.grid_ratios.size() == 0) throw InputError("ratio grid is empty");
  for (Eigen::Index k = 0; k < cfg.grid_ratios.size(); ++k) {
    const double r = cfg.grid_ratios(k);
    if (!(r > 0.0 && r <= 1.0)) throw InputError("ratios must be in (0,1]");
    if (k > 0 && r < cfg.grid_ratios(k - 1)) {
      throw InputError("ratios must be nondecreasing");
    }
  }
  for (Eigen::Index g = 0; g < cfg.y_grid.size(); ++g) {
    const double y = cfg.y_grid(g);
    if (!(y > 0.0 && y < 1.0)) throw InputError("y grid values must be in (0,1)");
    if (g > 0 && y <= cfg.y_grid(g - 1)) {
      throw InputError("y grid must be strictly increasing");
    }
  }
}

}  // namespace

SimModel SimModel::gpd(double gamma) {
  if (gamma == 0.0) throw InputError("gpd gamma must be nonzero");
  SimModel model;
  model.family = Family::GPD;
  model.gamma = gamma;
  model.tau0 = gamma > 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / gamma;
  return model;
}

SimModel SimModel::half_cauchy() {
  SimModel model;
  model.family = Family::HalfCauchy;
  model.gamma = 1.0;
  return model;
}

SimModel SimModel::beta(double mu) {
  if (!(mu > 0.0)) throw InputError("beta mu must be positive");
  SimModel model;
  model.family = Family::Beta;
  model.gamma = -1.0 / mu;
  model.mu = mu;
  model.tau0 = 1.0;
  return model;
}

std::string SimModel::name() const {
  switch (family) {
    case Family::GPD: return "gpd(" + short_double(gamma) + ")";
    case Family::HalfCauchy: return "halfcauchy";
    case Family::Beta: return "beta(" + short_double(mu) + ")";
  }
  return {};
}

std::string SimModel::file_tag() const {
  switch (family) {
    case Family::GPD: return "gpd_gamma" + short_double(gamma);
    case Family::HalfCauchy: return "halfcauchy";
    case Family::Beta: return "beta_mu" + short_double(mu);
  }
  return {};
}

Eigen::VectorXd default_ratio_grid() {
  Eigen::VectorXd grid(24);
  for (int k = 1; k <= 24; ++k) grid(k - 1) = static_cast<double>(k) / 24.0;
  return grid;
}

double cdf_susceptible(const SimModel& model, double t) {
  if (t <= 0.0) return 0.0;
  switch (model.family) {
    case Family::GPD:
      if (t >= model.tau0) return 1.0;
      return 1.0 - std::pow(1.0 + model.gamma * t, -1.0 / model.gamma);
    case Family::HalfCauchy:
      return 2.0 / std::numbers::pi * std::atan(t);
    case Family::Beta:
      if (t >= 1.0) return 1.0;
      return 1.0 - std::pow(1.0 - t, model.mu);
  }
  return 0.0;
}

double quantile_susceptible(const SimModel& model, double q) {
  switch (model.family) {
    case Family::GPD:
      return (std::pow(1.0 - q, -model.gamma) - 1.0) / model.gamma;
    case Family::HalfCauchy:
      return std::tan(std::numbers::pi * q / 2.0);
    case Family::Beta:
      return 1.0 - std::pow(1.0 - q, 1.0 / model.mu);
  }
  return 0.0;
}

double sample_susceptible(const SimModel& model, RngStream& stream) {
  return quantile_susceptible(model, stream.uniform());
}

GeneratedData gen_dataset(const SimModel& model, double p, double tau_c,
                          double epsilon, int n, RngStream& stream,
                          bool apply_psi) {
  std::vector<Observation> raw(n);
  std::vector<bool> cured_raw(n);
  for (int i = 0; i < n; ++i) {
    const double u_cure = stream.uniform();
    const double u_time = stream.uniform();
    const double u_atom = stream.uniform();
    const double u_censor = stream.uniform();
    const bool cured = u_cure < 1.0 - p;
    const double censor_time = u_atom < epsilon ? tau_c : tau_c * u_censor;
    if (cured) {
      raw[i] = {censor_time, false};
    } else {
      const double survival_time = quantile_susceptible(model, u_time);
      raw[i] = {std::min(survival_time, censor_time), survival_time <= censor_time};
    }
    cured_raw[i] = cured;
  }

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&raw](int a, int b) {
    return observation_before(raw[a], raw[b]);
  });

  GeneratedData data;
  data.sample.time.resize(n);
  data.sample.event.resize(n);
  data.cured.resize(n);
  for (int i = 0; i < n; ++i) {
    data.sample.time(i) = raw[order[i]].time;
    data.sample.event(i) = raw[order[i]].event ? 1 : 0;
    data.cured[i] = cured_raw[order[i]];
  }
  if (apply_psi) data.sample = psi_transform(data.sample, model.tau0);
  return data;
}

std::vector<CurvePoint> run_experiment(const ExperimentConfig& cfg,
                                       const ProgressSink& progress) {
  validate(cfg);
  const double tau_95 = quantile_susceptible(cfg.model, 0.95);
  const RngKey root = RngKey::from_seed(cfg.seed);
  const Eigen::Index K = cfg.grid_ratios.size();
  const std::size_t total = static_cast<std::size_t>(K) * cfg.N;

  struct Replication {
    double p_star;
    double p_n;
    double censoring;
  };
  std::vector<Replication> slots(total);

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex state_mutex;
  std::exception_ptr failure;

  const bool transform = cfg.apply_psi && cfg.model.gamma < 0.0;
  auto worker = [&]() {
    for (;;) {
      const std::size_t index = next.fetch_add(1);
      if (index >= total) return;
      {
        std::lock_guard<std::mutex> lock(state_mutex);
        if (failure) return;
      }
      const Eigen::Index k = static_cast<Eigen::Index>(index) / cfg.N;
      const int j = static_cast<int>(index % cfg.N);
      try {
        const double tau_c = cfg.grid_ratios(k) * tau_95;
        const RngKey replication_key =
            root.child(static_cast<std::uint64_t>(k)).child(static_cast<std::uint64_t>(j));
        RngStream stream(replication_key);
        const GeneratedData data =
            gen_dataset(cfg.model, cfg.p, tau_c, cfg.epsilon, cfg.n, stream, transform);
        YSelectionConfig selection{cfg.y_grid, cfg.N_b, replication_key.state};
        const YStarResult result = select_y_star(data.sample, selection);
        slots[index] = {result.estimate.p_hat_y, result.p_hat_n,
                        censoring_proportion(data.sample)};
      } catch (...) {
        std::lock_guard<std::mutex> lock(state_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
      const std::size_t finished = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard<std::mutex> lock(state_mutex);
        progress(finished, total);
      }
    }
  };

  int thread_count = cfg.threads > 0
                         ? cfg.threads
                         : static_cast<int>(std::thread::hardware_concurrency());
  thread_count = std::max(thread_count, 1);
  if (thread_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<CurvePoint> curve(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    Eigen::VectorXd p_star(cfg.N);
    Eigen::VectorXd p_n(cfg.N);
    Eigen::VectorXd censoring(cfg.N);
    for (int j = 0; j < cfg.N; ++j) {
      const Replication& rep = slots[static_cast<std::size_t>(k) * cfg.N + j];
      p_star(j) = rep.p_star;
      p_n(j) = rep.p_n;
      censoring(j) = rep.censoring;
    }
    curve[k] = {cfg.grid_ratios(k),
                cfg.grid_ratios(k) * tau_95,
                p_star.mean(),
                (p_star.array() - cfg.p).square().mean(),
                p_n.mean(),
                (p_n.array() - cfg.p).square().mean(),
                censoring.mean()};
  }
  return curve;
}

}  // namespace curex
