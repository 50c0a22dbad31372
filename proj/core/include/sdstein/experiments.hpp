#pragma once

// The experiment registry: every quantitative statement the library claims is
// reproducible as one registered, seeded, config-driven experiment emitting a
// machine-checkable report.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sdstein/report.hpp"

namespace sdstein {

struct ExperimentDescriptor {
  std::string id;
  std::string description;
  std::string anchor;  // the mathematical statement the experiment exercises
};

class ExperimentRegistry {
 public:
  static const ExperimentRegistry& instance();

  std::vector<ExperimentDescriptor> list() const;
  bool contains(const std::string& id) const;
  /// Runs the experiment named by the config; throws UnknownExperiment for
  /// ids outside the registry.
  ExperimentReport run(const ExperimentConfig& config) const;

 private:
  ExperimentRegistry();
  using Runner = std::function<std::vector<CheckRecord>(const ExperimentConfig&)>;
  struct Entry {
    ExperimentDescriptor descriptor;
    Runner runner;
  };
  std::map<std::string, Entry> entries_;
};

}  // namespace sdstein
