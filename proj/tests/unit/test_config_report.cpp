#include <catch2/catch_amalgamated.hpp>

#include "sdstein/errors.hpp"
#include "sdstein/experiments.hpp"
#include "sdstein/report.hpp"

using namespace sdstein;
using nlohmann::json;

TEST_CASE("config parsing is strict", "[config]") {
  const json good = {{"experiment", "distance-ordering"},
                     {"seed", 7},
                     {"budgets", {{"n_samples", 256}}},
                     {"tolerances", {{"assignment_n", 64}}}};
  const ExperimentConfig cfg = ExperimentConfig::from_json(good);
  CHECK(cfg.experiment == "distance-ordering");
  CHECK(cfg.seed == 7);
  CHECK(cfg.budgets.n_samples == 256);
  CHECK(cfg.budgets.n_mc == 20000);  // default preserved

  json missing_seed = good;
  missing_seed.erase("seed");
  CHECK_THROWS_AS(ExperimentConfig::from_json(missing_seed), ConfigInvalid);

  json unknown_field = good;
  unknown_field["surprise"] = 1;
  CHECK_THROWS_AS(ExperimentConfig::from_json(unknown_field), ConfigInvalid);

  json unknown_budget = good;
  unknown_budget["budgets"]["typo"] = 2;
  CHECK_THROWS_AS(ExperimentConfig::from_json(unknown_budget), ConfigInvalid);

  json bad_tol = good;
  bad_tol["tolerances"] = 3;
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad_tol), ConfigInvalid);
}

TEST_CASE("report verdicts are recomputable from the recorded numbers", "[config]") {
  ExperimentReport report;
  report.config_echo = {{"experiment", "demo"}};
  report.checks.push_back({"a", 0.5, 0.1, 1.0, true, ""});
  report.checks.push_back({"b", 2.0, 0.1, 1.0, false, ""});
  CHECK_FALSE(report.pass());
  const json j = report.to_json();
  CHECK(j.at("overall") == "fail");
  for (const auto& c : j.at("checks")) {
    const bool recomputed = c.at("estimate").get<double>() <= c.at("bound").get<double>();
    CHECK(recomputed == (c.at("verdict") == "pass"));
  }
  CHECK(j.at("schema_version") == 1);
}

TEST_CASE("registry lists the full experiment set", "[config]") {
  const auto& registry = ExperimentRegistry::instance();
  const auto listed = registry.list();
  CHECK(listed.size() >= 9);
  for (const char* id :
       {"catalog-check", "identity-check", "stein-residual", "derivative-bounds",
        "semigroup-laws", "discrepancy-bound", "galerkin-kernel", "poincare",
        "smoothing-rate", "distance-ordering", "convergence-sequence"}) {
    CHECK(registry.contains(id));
  }
  for (const auto& d : listed) {
    CHECK_FALSE(d.description.empty());
    CHECK_FALSE(d.anchor.empty());
  }
  // anchors tie the two flagship experiments to their statements
  bool smoothing_anchor = false, discrepancy_anchor = false;
  for (const auto& d : listed) {
    if (d.id == "smoothing-rate" && d.anchor.find("smoothing rate") != std::string::npos) {
      smoothing_anchor = true;
    }
    if (d.id == "discrepancy-bound" && d.anchor.find("transport bound") != std::string::npos) {
      discrepancy_anchor = true;
    }
  }
  CHECK(smoothing_anchor);
  CHECK(discrepancy_anchor);
}

TEST_CASE("unknown experiments are rejected", "[config]") {
  ExperimentConfig cfg;
  cfg.experiment = "not-an-experiment";
  cfg.seed = 1;
  cfg.tolerances = json::object();
  CHECK_THROWS_AS(ExperimentRegistry::instance().run(cfg), UnknownExperiment);
}

TEST_CASE("experiment reports are deterministic for a fixed config", "[config]") {
  ExperimentConfig cfg;
  cfg.experiment = "distance-ordering";
  cfg.seed = 99;
  cfg.budgets.n_samples = 200;
  cfg.tolerances = {{"assignment_n", 96}};
  const auto& registry = ExperimentRegistry::instance();
  json a = registry.run(cfg).to_json();
  json b = registry.run(cfg).to_json();
  a.erase("wall_clock_ms");
  b.erase("wall_clock_ms");
  CHECK(a.dump() == b.dump());
  CHECK(a.at("overall") == "pass");
}
