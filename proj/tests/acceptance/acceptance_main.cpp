// Acceptance suite: one line per criterion, each backed by a registry
// experiment with a pinned seed, budget, and tolerance. Exit code 0 only if
// every criterion passes.

#include <chrono>
#include <cstdio>
#include <exception>
#include <string>

#include "sdstein/experiments.hpp"

namespace {

struct Criterion {
  int number;
  const char* title;
  const char* config_json;
};

const Criterion kCriteria[] = {
    {1, "characterization identity (gamma1d, multi_gamma d=2)",
     R"({"experiment":"identity-check","seed":20260810,"budgets":{"n_samples":100000}})"},
    {2, "Stein equation residual (gamma1d, stable d=1)",
     R"({"experiment":"stein-residual","seed":20260811,
         "budgets":{"n_mc":20000,"n_samples":100000},
         "tolerances":{"tau_q":0.01}})"},
    {3, "Stein solution derivative bounds (d=1,2)",
     R"({"experiment":"derivative-bounds","seed":20260812,
         "budgets":{"n_mc":8000,"n_samples":100000}})"},
    {4, "semigroup composition and invariance",
     R"({"experiment":"semigroup-laws","seed":20260813,"budgets":{"n_samples":200000}})"},
    {5, "W2 against the kernel discrepancy bound",
     R"({"experiment":"discrepancy-bound","seed":20260814,
         "budgets":{"n_samples":100000},"tolerances":{"assignment_n":2048}})"},
    {6, "Galerkin kernel sanity at Y ~ X",
     R"({"experiment":"galerkin-kernel","seed":20260815,
         "budgets":{"n_samples":100000},"tolerances":{"discrepancy_tol":0.01}})"},
    {7, "Poincare Rayleigh ratios at Y ~ X",
     R"({"experiment":"poincare","seed":20260816,"budgets":{"n_samples":200000}})"},
    {8, "W1 smoothing rate across the catalog (d=1,2)",
     R"({"experiment":"smoothing-rate","seed":20260817,
         "tolerances":{"assignment_n":1024}})"},
    {9, "distance estimator ordering chain",
     R"({"experiment":"distance-ordering","seed":20260818,
         "tolerances":{"assignment_n":512}})"},
    {10, "smooth-W2 convergence along the interpolation sequence",
     R"({"experiment":"convergence-sequence","seed":20260819,
         "budgets":{"n_samples":100000}})"},
};

}  // namespace

int main() {
  const auto& registry = sdstein::ExperimentRegistry::instance();
  int failures = 0;
  double total_seconds = 0.0;

  for (const Criterion& criterion : kCriteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string verdict = "PASS";
    std::string detail;
    try {
      const auto config = sdstein::ExperimentConfig::from_json(
          nlohmann::json::parse(criterion.config_json));
      const sdstein::ExperimentReport report = registry.run(config);
      int failed_checks = 0;
      double worst_margin = 1e300;
      std::string worst_name;
      for (const auto& check : report.checks) {
        const double margin = check.bound - check.estimate;
        if (margin < worst_margin) {
          worst_margin = margin;
          worst_name = check.name;
        }
        if (!check.pass) ++failed_checks;
      }
      if (failed_checks > 0) {
        verdict = "FAIL";
        ++failures;
        detail = std::to_string(failed_checks) + "/" +
                 std::to_string(report.checks.size()) + " checks failed";
        for (const auto& check : report.checks) {
          if (!check.pass) {
            detail += "; " + check.name + " est=" + std::to_string(check.estimate) +
                      " bound=" + std::to_string(check.bound);
          }
        }
      } else {
        detail = "tightest: " + worst_name + " (margin " +
                 std::to_string(worst_margin) + ")";
      }
    } catch (const std::exception& e) {
      verdict = "FAIL";
      ++failures;
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    total_seconds += seconds;
    std::printf("[%2d/10] %s  %-52s (%.1f s)  %s\n", criterion.number, verdict.c_str(),
                criterion.title, seconds, detail.c_str());
    std::fflush(stdout);
  }

  std::printf("%s: %d/10 criteria passed in %.1f s\n",
              failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL", 10 - failures,
              total_seconds);
  return failures == 0 ? 0 : 1;
}
