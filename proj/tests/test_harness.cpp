#include "doctest.h"

#include <cmath>

#include "itb/errors.hpp"
#include "itb/harness.hpp"
#include "itb/qprop.hpp"
#include "itb/scenario_io.hpp"

using namespace itb;

namespace {

bool same_rows(const std::vector<MetricRow>& a, const std::vector<MetricRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto& x = a[k];
    const auto& y = b[k];
    if (x.scenario != y.scenario || x.t != y.t || x.validity_ratio != y.validity_ratio ||
        x.l2_density_error != y.l2_density_error ||
        x.sup_density_error_at_classical_points != y.sup_density_error_at_classical_points ||
        x.fidelity != y.fidelity || x.identity_deviation != y.identity_deviation ||
        x.transport_deviation != y.transport_deviation) {
      return false;
    }
  }
  return true;
}

const ScenarioRun& free_run() {
  static const ScenarioRun run = run_scenario(builtin_scenario("free-gaussian"));
  return run;
}

}  // namespace

TEST_CASE("free gaussian builtin: one row per time, errors shrink") {
  const ScenarioRun& run = free_run();
  REQUIRE(run.rows.size() == 5);
  for (std::size_t k = 0; k < run.rows.size(); ++k) {
    const MetricRow& r = run.rows[k];
    CHECK(r.t == run.scenario.schedule[k]);
    CHECK(r.validity_ratio == doctest::Approx(r.t));
    for (double v : {r.l2_density_error, r.sup_density_error_at_classical_points, r.fidelity,
                     r.identity_deviation, r.transport_deviation}) {
      CHECK(std::isfinite(v));
      CHECK(v >= 0.0);
    }
    CHECK(r.fidelity <= 1.0 + 1e-9);
    CHECK(r.identity_deviation <= 1e-8);
    if (k > 0) {
      CHECK(r.l2_density_error < run.rows[k - 1].l2_density_error);
      CHECK(r.transport_deviation < run.rows[k - 1].transport_deviation);
      CHECK(r.fidelity > run.rows[k - 1].fidelity);
    }
  }
  REQUIRE(run.convergence_slope.has_value());
  REQUIRE(run.validity.size() == 5);
  CHECK(run.validity.back().f == doctest::Approx(10.0));
  REQUIRE(run.scenario.grid.has_value());
}

TEST_CASE("relative density error against the closed form: measured decay law") {
  // Independent oracle: closed-form exact density versus the closed-form
  // imaging density on the same points, relative L2 over the support.
  auto oracle = [](double t) {
    double num = 0.0, den = 0.0;
    const double L = 12.0 * t;
    const int n = 40000;
    for (int j = 0; j <= n; ++j) {
      const double x = -L + 2.0 * L * j / n;
      const double exact = std::norm(analytic_free_gaussian(1.0, x, t, Units{}));
      const double it = std::exp(-x * x / (t * t)) / (t * std::sqrt(kPi));
      if (exact < 1e-12 / std::sqrt(kPi * (1.0 + t * t))) continue;
      num += (exact - it) * (exact - it);
      den += exact * exact;
    }
    return std::sqrt(num / den);
  };
  for (const MetricRow& r : free_run().rows) {
    CHECK(r.l2_density_error == doctest::Approx(oracle(r.t)).epsilon(1e-3));
  }
  // The measured law is quadratic in the inverse ratio.
  const ConvergenceResult c = convergence_scan(builtin_scenario("free-gaussian"), geometric_times(10.0, 100.0, 6));
  MESSAGE("fitted slope " << c.slope);
  CHECK(c.slope == doctest::Approx(-2.0).epsilon(0.05));
  CHECK(c.rows.size() == 6);
}

TEST_CASE("convergence scan preconditions") {
  const Scenario s = builtin_scenario("free-gaussian");
  CHECK_THROWS_WITH_AS(convergence_scan(s, {50.0}), doctest::Contains("ScenarioInvalid"), Error);
  CHECK_THROWS_WITH_AS(convergence_scan(s, geometric_times(20.0, 100.0, 5)), doctest::Contains("decade"), Error);
  CHECK_THROWS_WITH_AS(convergence_scan(s, geometric_times(1.0, 100.0, 5)), doctest::Contains("zone"), Error);
  CHECK_THROWS_WITH_AS(convergence_scan(s, geometric_times(10.0, 100.0, 5), 10.0), doctest::Contains("zone"), Error);
}

TEST_CASE("linear field convergence slope is reported") {
  Scenario s = builtin_scenario("linear-field");
  const ConvergenceResult c = convergence_scan(s, geometric_times(10.0, 100.0, 5));
  MESSAGE("linear-field slope " << c.slope);
  CHECK(std::isfinite(c.slope));
  CHECK(c.slope < 0.0);
}

TEST_CASE("reference potentials: identity-level checks inside every run") {
  for (const char* name : {"linear-field", "harmonic"}) {
    const ScenarioRun run = run_scenario(builtin_scenario(name));
    for (const MetricRow& r : run.rows) {
      CHECK(r.identity_deviation <= 1e-5);
      CHECK(r.fidelity <= 1.0 + 1e-9);
      CHECK(r.l2_density_error < 0.05);
    }
  }
}

TEST_CASE("anharmonic builtin runs through the split-operator oracle") {
  const ScenarioRun run = run_scenario(builtin_scenario("anharmonic"));
  REQUIRE(run.rows.size() == 3);
  CHECK(run.rows.back().l2_density_error < run.rows.front().l2_density_error);
}

TEST_CASE("hydrogen electron validity row") {
  const ScenarioRun run = run_scenario(builtin_scenario("hydrogen-electron"));
  REQUIRE(run.validity.size() == 1);
  CHECK(run.validity[0].t == 1e4);
  CHECK(run.validity[0].x_i == doctest::Approx(100.0).epsilon(1e-15));
  CHECK(run.validity[0].f == doctest::Approx(100.0).epsilon(1e-15));
  CHECK(run.validity[0].verdict == ZoneVerdict::inside_zone);
}

TEST_CASE("harmonic caustic aborts the scenario") {
  try {
    run_scenario(builtin_scenario("harmonic-caustic"));
    FAIL("expected CausticSingular");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CausticSingular);
    CHECK(std::string(e.what()).find("harmonic-caustic") != std::string::npos);
    CHECK(std::string(e.what()).find("check ") != std::string::npos);
  }
}

TEST_CASE("runs are deterministic") {
  const ScenarioRun again = run_scenario(builtin_scenario("free-gaussian"));
  CHECK(same_rows(again.rows, free_run().rows));
}

TEST_CASE("auto grid keeps the packet inside the box") {
  for (const auto& name : builtin_names()) {
    const Scenario s = builtin_scenario(name);
    const SpatialGrid g = auto_grid(s);
    CHECK(g.dx() <= s.initial.sigma / 4.0);
    CHECK(is_power_of_two(g.n()));
  }
  Scenario moving = builtin_scenario("free-gaussian");
  moving.initial.p0 = 3.0;
  moving.schedule = {2.0, 5.0, 8.0};
  const SpatialGrid g = auto_grid(moving);
  CHECK(g.x_max() > 3.0 * 8.0 + 8.0 * std::sqrt(1.0 + 64.0));
  CHECK_NOTHROW(run_scenario(moving));
}

TEST_CASE("scenario validation") {
  Scenario s = builtin_scenario("free-gaussian");
  s.schedule = {1.0, 1.0};
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("ScenarioInvalid"), Error);
  s.schedule = {-1.0, 2.0};
  CHECK_THROWS_AS(s.validate(), Error);
  s = builtin_scenario("free-gaussian");
  s.initial.sigma = 0.0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = builtin_scenario("free-gaussian");
  s.units.mass = -1.0;
  CHECK_THROWS_AS(s.validate(), Error);
  CHECK_THROWS_AS(builtin_scenario("nope"), Error);
  CHECK_THROWS_AS(parse_check("identity5"), Error);
}

TEST_CASE("every builtin names the relations it evidences") {
  for (const auto& name : builtin_names()) {
    const Scenario s = builtin_scenario(name);
    CHECK_FALSE(s.evidences.empty());
    CHECK(s.name == name);
    CHECK_NOTHROW(s.validate());
  }
}

TEST_CASE("transition zone table") {
  const auto rows = transition_zone_table({1.0, 1836.0}, 1.0, {100.0, 1.0});
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].t_i == 1e4);
  CHECK(rows[0].x_i == 100.0);
  CHECK(rows[1].x_i == 1.0);
  CHECK(rows[2].t_i == doctest::Approx(1.836e7).epsilon(1e-15));
  CHECK_THROWS_AS(transition_zone_table({-1.0}, 1.0, {1.0}), Error);
}

TEST_CASE("geometric times and line fit") {
  const auto ts = geometric_times(10.0, 100.0, 3);
  CHECK(ts[1] == doctest::Approx(std::sqrt(1000.0)));
  CHECK(ts.back() == 100.0);
  const auto [b, a] = fit_line({0.0, 1.0, 2.0}, {1.0, 3.0, 5.0});
  CHECK(b == doctest::Approx(2.0));
  CHECK(a == doctest::Approx(1.0));
  CHECK_THROWS_AS(fit_line({1.0}, {1.0}), Error);
}

TEST_CASE("scenario JSON round trip and overrides") {
  for (const auto& name : builtin_names()) {
    const Scenario s = builtin_scenario(name);
    const Scenario back = scenario_from_json(scenario_to_json(s));
    CHECK(scenario_to_json(back) == scenario_to_json(s));
  }
  Scenario s = builtin_scenario("linear-field");
  apply_override(s, "initial.sigma=2");
  apply_override(s, "potential.force=0.25");
  apply_override(s, "schedule=[4, 8]");
  CHECK(s.initial.sigma == 2.0);
  CHECK(std::get<LinearPotential>(s.potential).force == 0.25);
  CHECK(s.schedule == std::vector<double>{4.0, 8.0});
  apply_override(s, "potential=\"harmonic:omega=0.5\"");
  CHECK(std::holds_alternative<HarmonicPotential>(s.potential));
  CHECK_THROWS_WITH_AS(apply_override(s, "initial.width=2"), doctest::Contains("unknown key"), Error);
  CHECK_THROWS_WITH_AS(apply_override(s, "schedule=[3, 2]"), doctest::Contains("ScenarioInvalid"), Error);
  CHECK_THROWS_AS(scenario_from_json("{not json"), Error);
  CHECK_THROWS_AS(scenario_from_json(R"({"name": "x", "checks": ["identity5"], "schedule": [1]})"), Error);
}

TEST_CASE("run JSON re-ingests to the same run") {
  const std::string doc = run_to_json(free_run());
  const Scenario again = scenario_from_json(doc);
  REQUIRE(again.grid.has_value());
  CHECK(*again.grid == *free_run().scenario.grid);
  CHECK(same_rows(run_scenario(again).rows, free_run().rows));
}

TEST_CASE("metric CSV layout") {
  const std::string csv = metrics_csv(free_run().rows);
  const std::string header = csv.substr(0, csv.find('\n'));
  std::string expect;
  for (const auto& c : metric_columns()) expect += (expect.empty() ? "" : ",") + c;
  CHECK(header == expect);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  CHECK(format_double(0.1) == "0.10000000000000001");
}
