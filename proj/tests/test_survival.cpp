#include <doctest.h>

#include <vector>

#include "curex/rng.hpp"
#include "curex/survival.hpp"
#include "support/stats.hpp"

using namespace curex;

namespace {

SurvivalSample make_sample(const std::vector<double>& time,
                          const std::vector<int>& event) {
  std::vector<Observation> raw;
  raw.reserve(time.size());
  for (std::size_t i = 0; i < time.size(); ++i) {
    raw.push_back({time[i], event[i] == 1});
  }
  return build_sample(raw);
}

}  // namespace

TEST_CASE("build_sample validates and sorts") {
  SUBCASE("empty input") {
    CHECK_THROWS_AS(build_sample({}), EmptySample);
  }
  SUBCASE("negative time") {
    CHECK_THROWS_AS(build_sample({{-1.0, true}}), NegativeTime);
  }
  SUBCASE("non-finite time") {
    CHECK_THROWS_AS(build_sample({{std::numeric_limits<double>::quiet_NaN(), true}}),
                    NonFiniteTime);
    CHECK_THROWS_AS(build_sample({{std::numeric_limits<double>::infinity(), false}}),
                    NonFiniteTime);
  }
  SUBCASE("sorting puts events before censorings at ties") {
    const SurvivalSample s = make_sample({3.0, 1.0, 1.0, 2.0}, {0, 0, 1, 1});
    CHECK(s.time(0) == 1.0);
    CHECK(s.event(0) == 1);
    CHECK(s.time(1) == 1.0);
    CHECK(s.event(1) == 0);
    CHECK(s.time(3) == 3.0);
    CHECK(s.max_time() == 3.0);
  }
}

TEST_CASE("Kaplan-Meier hand-checked values") {
  SUBCASE("event then two censorings") {
    const SurvivalSample s = make_sample({1.0, 2.0, 3.0}, {1, 0, 0});
    const StepCurve f = kaplan_meier(s);
    CHECK(evaluate(f, 0.5) == 0.0);
    CHECK(evaluate(f, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(evaluate(f, 3.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(plateau_estimate(s) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("last observation is an event") {
    const SurvivalSample s = make_sample({1.0, 2.0, 3.0}, {1, 0, 1});
    const StepCurve f = kaplan_meier(s);
    CHECK(evaluate(f, 2.9) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(evaluate(f, 3.0) == 1.0);
    CHECK(plateau_estimate(s) == 1.0);
  }
  SUBCASE("all events gives the empirical CDF") {
    const SurvivalSample s = make_sample({4.0, 1.0, 3.0, 2.0}, {1, 1, 1, 1});
    const StepCurve f = kaplan_meier(s);
    for (int k = 1; k <= 4; ++k) {
      CHECK(evaluate(f, k) == doctest::Approx(k / 4.0).epsilon(1e-15));
    }
  }
  SUBCASE("left limits") {
    const SurvivalSample s = make_sample({1.0, 2.0}, {1, 1});
    const StepCurve f = kaplan_meier(s);
    CHECK(evaluate_left(f, 1.0) == 0.0);
    CHECK(evaluate_left(f, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(evaluate_left(f, 5.0) == 1.0);
  }
}

TEST_CASE("censoring curve flips indicators") {
  const SurvivalSample s = make_sample({1.0, 2.0, 3.0}, {0, 1, 0});
  const StepCurve fc = censoring_km(s);
  CHECK(evaluate(fc, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(evaluate(fc, 2.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(evaluate(fc, 3.0) == 1.0);
  CHECK(censoring_proportion(s) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("Kaplan-Meier matches the brute-force product on small samples") {
  RngStream stream(RngKey::from_seed(31));
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 1 + static_cast<int>(stream.uniform_int(6));
    std::vector<double> time(n);
    std::vector<int> event(n);
    for (int i = 0; i < n; ++i) {
      time[i] = std::floor(stream.uniform() * 4.0);  // forces ties
      event[i] = stream.uniform() < 0.5 ? 1 : 0;
    }
    const SurvivalSample s = make_sample(time, event);
    const StepCurve f = kaplan_meier(s);
    for (double t : {0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0}) {
      CHECK(evaluate(f, t) ==
            doctest::Approx(test_support::km_brute_force(time, event, t))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("Kaplan-Meier curve is a nondecreasing sub-CDF") {
  RngStream stream(RngKey::from_seed(77));
  std::vector<double> time(400);
  std::vector<int> event(400);
  for (std::size_t i = 0; i < time.size(); ++i) {
    time[i] = -std::log(stream.uniform());
    event[i] = stream.uniform() < 0.7 ? 1 : 0;
  }
  const SurvivalSample s = make_sample(time, event);
  const StepCurve f = kaplan_meier(s);
  double prev = 0.0;
  for (Eigen::Index i = 0; i < f.values.size(); ++i) {
    CHECK(f.values(i) >= prev);
    CHECK(f.values(i) <= 1.0);
    prev = f.values(i);
  }
  CHECK(curve_plateau(f) == evaluate(f, s.max_time()));
  CHECK(plateau_estimate(s) == curve_plateau(f));
}

TEST_CASE("plateau estimate approaches the susceptible fraction") {
  // Mixture with p = 0.6 susceptible (Exp(1) times); censoring has an atom at
  // tau_c = 12 so follow-up is sufficient and the plateau estimates p.
  auto draw_plateau = [](int n, std::uint64_t seed) {
    RngStream stream(RngKey::from_seed(seed));
    std::vector<double> time(n);
    std::vector<int> event(n);
    const double tau_c = 12.0;
    for (int i = 0; i < n; ++i) {
      const bool cured = stream.uniform() >= 0.6;
      const double t =
          cured ? std::numeric_limits<double>::infinity() : -std::log(stream.uniform());
      const double c = stream.uniform() < 0.3 ? tau_c : tau_c * stream.uniform();
      time[i] = std::min(t, c);
      event[i] = t <= c ? 1 : 0;
    }
    std::vector<Observation> raw(n);
    for (int i = 0; i < n; ++i) raw[i] = {time[i], event[i] == 1};
    return plateau_estimate(build_sample(raw));
  };
  const double err_small = std::abs(draw_plateau(200, 11) - 0.6);
  const double err_large = std::abs(draw_plateau(20000, 11) - 0.6);
  CHECK(err_large < err_small);
  CHECK(err_large < 0.02);
}
