// sdstein: config-driven experiment runner for the self-decomposable Stein
// laboratory.
//
//   sdstein run --config cfg.json [--seed N] [--out DIR]   run one experiment
//   sdstein list                                            registry listing
//   sdstein catalog                                         built-in laws
//
// Exit codes: 0 all checks pass, 1 at least one check failed, 2 usage or
// configuration error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "sdstein/catalog.hpp"
#include "sdstein/errors.hpp"
#include "sdstein/experiments.hpp"
#include "sdstein/version.hpp"

namespace {

int run_command(const std::string& config_path, std::optional<std::uint64_t> seed,
                const std::string& out_dir) {
  sdstein::ExperimentConfig config = sdstein::ExperimentConfig::from_file(config_path);
  if (seed) config.seed = *seed;
  if (!out_dir.empty()) config.output_dir = out_dir;
  const sdstein::ExperimentReport report =
      sdstein::ExperimentRegistry::instance().run(config);
  std::cout << report.to_json().dump(2) << "\n";
  return report.pass() ? 0 : 1;
}

int list_command() {
  for (const auto& d : sdstein::ExperimentRegistry::instance().list()) {
    std::printf("%-22s %s [%s]\n", d.id.c_str(), d.description.c_str(),
                d.anchor.c_str());
  }
  return 0;
}

int catalog_command() {
  for (const auto& law : sdstein::catalog::standard_catalog()) {
    std::printf("%-24s family=%-17s d=%d\n", law.id.c_str(),
                sdstein::family_name(law.family).c_str(), law.dim());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for Stein's method on self-decomposable laws"};
  app.set_version_flag("--version", sdstein::kVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;

  CLI::App* run = app.add_subcommand("run", "run one experiment from a JSON config");
  run->add_option("--config", config_path, "experiment config file")->required();
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out", out_dir, "report/CSV output directory");

  CLI::App* list = app.add_subcommand("list", "list the experiment registry");
  CLI::App* cat = app.add_subcommand("catalog", "list the built-in law catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return run_command(config_path, seed, out_dir);
    if (list->parsed()) return list_command();
    if (cat->parsed()) return catalog_command();
  } catch (const sdstein::ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const sdstein::UnknownExperiment& e) {
    std::cerr << "unknown experiment: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
