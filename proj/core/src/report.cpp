#include "sdstein/report.hpp"

#include <filesystem>
#include <fstream>

#include "sdstein/errors.hpp"
#include "sdstein/version.hpp"

namespace sdstein {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigInvalid(where + ": unknown field '" + key + "'");
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  reject_unknown(j, {"experiment", "law", "budgets", "seed", "tolerances", "output_dir"},
                 "config");
  ExperimentConfig cfg;
  if (!j.contains("experiment")) throw ConfigInvalid("config: 'experiment' is required");
  cfg.experiment = j.at("experiment").get<std::string>();
  if (!j.contains("seed")) throw ConfigInvalid("config: 'seed' is required");
  if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer()) {
    throw ConfigInvalid("config: 'seed' must be an integer");
  }
  cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("law")) cfg.law = j.at("law");
  if (j.contains("budgets")) {
    const json& b = j.at("budgets");
    reject_unknown(b, {"n_mc", "n_samples", "time_nodes"}, "config.budgets");
    cfg.budgets.n_mc = b.value("n_mc", cfg.budgets.n_mc);
    cfg.budgets.n_samples = b.value("n_samples", cfg.budgets.n_samples);
    cfg.budgets.time_nodes = b.value("time_nodes", cfg.budgets.time_nodes);
    if (cfg.budgets.n_mc < 100 || cfg.budgets.n_samples < 100) {
      throw ConfigInvalid("config.budgets: sizes must be >= 100");
    }
  }
  if (j.contains("tolerances")) {
    if (!j.at("tolerances").is_object()) {
      throw ConfigInvalid("config.tolerances: must be an object");
    }
    cfg.tolerances = j.at("tolerances");
  } else {
    cfg.tolerances = json::object();
  }
  cfg.output_dir = j.value("output_dir", std::string{});
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigInvalid(std::string("config parse error: ") + e.what());
  }
  return from_json(j);
}

json ExperimentConfig::to_json() const {
  json j;
  j["experiment"] = experiment;
  if (!law.is_null()) j["law"] = law;
  j["budgets"] = {{"n_mc", budgets.n_mc},
                  {"n_samples", budgets.n_samples},
                  {"time_nodes", budgets.time_nodes}};
  j["seed"] = seed;
  j["tolerances"] = tolerances;
  if (!output_dir.empty()) j["output_dir"] = output_dir;
  return j;
}

bool ExperimentReport::pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

json ExperimentReport::to_json() const {
  json j;
  j["schema_version"] = 1;
  j["library_version"] = library_version.empty() ? kVersion : library_version;
  j["config"] = config_echo;
  j["checks"] = json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name},
                           {"estimate", c.estimate},
                           {"se", c.se},
                           {"bound", c.bound},
                           {"verdict", c.pass ? "pass" : "fail"},
                           {"note", c.note}});
  }
  j["overall"] = pass() ? "pass" : "fail";
  j["wall_clock_ms"] = wall_clock_ms;
  return j;
}

void ExperimentReport::write(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  const std::string name = config_echo.value("experiment", "experiment");
  std::ofstream out(dir + "/" + name + "_report.json");
  if (!out) throw Error("cannot write report in " + dir);
  out << to_json().dump(2) << "\n";
}

}  // namespace sdstein
