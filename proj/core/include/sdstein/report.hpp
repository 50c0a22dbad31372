#pragma once

// Experiment configuration and report records. Reports are versioned JSON
// whose verdicts are recomputable from the recorded numbers alone; the wall
// clock is the only field allowed to differ between identical runs.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace sdstein {

struct Budgets {
  int n_mc = 20000;       // inner Monte Carlo size (semigroup caches etc.)
  int n_samples = 100000; // sample-cloud size
  int time_nodes = 8;     // Gauss-Legendre nodes per time panel
};

struct ExperimentConfig {
  std::string experiment;
  nlohmann::json law;  // law spec JSON, or null for the experiment default
  Budgets budgets;
  std::uint64_t seed = 0;
  nlohmann::json tolerances;  // per-experiment overrides
  std::string output_dir;

  /// Strict parse: unknown fields anywhere are rejected, the seed is
  /// mandatory.
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);
  nlohmann::json to_json() const;
};

struct CheckRecord {
  std::string name;
  double estimate = 0.0;
  double se = 0.0;
  double bound = 0.0;  // the threshold the estimate was compared against
  bool pass = false;
  std::string note;
};

struct ExperimentReport {
  nlohmann::json config_echo;
  std::vector<CheckRecord> checks;
  double wall_clock_ms = 0.0;
  std::string library_version;

  bool pass() const;
  nlohmann::json to_json() const;
  /// Writes <dir>/<experiment>_report.json; creates the directory if needed.
  void write(const std::string& dir) const;
};

}  // namespace sdstein
