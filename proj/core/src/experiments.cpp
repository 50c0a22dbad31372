#include "sdstein/experiments.hpp"

#include <chrono>
#include <cmath>

#include "sdstein/catalog.hpp"
#include "sdstein/charfn.hpp"
#include "sdstein/detail/parallel.hpp"
#include "sdstein/distances.hpp"
#include "sdstein/errors.hpp"
#include "sdstein/semigroup.hpp"
#include "sdstein/stein_kernel.hpp"
#include "sdstein/version.hpp"

namespace sdstein {

namespace {

using nlohmann::json;

double tolerance(const ExperimentConfig& cfg, const char* key, double fallback) {
  if (cfg.tolerances.contains(key)) return cfg.tolerances.at(key).get<double>();
  return fallback;
}

CheckRecord check(std::string name, double estimate, double se, double bound,
                  bool pass, std::string note = {}) {
  return CheckRecord{std::move(name), estimate, se, bound, pass, std::move(note)};
}

CheckRecord check_leq(std::string name, double estimate, double se, double bound,
                      std::string note = {}) {
  return check(std::move(name), estimate, se, bound, estimate <= bound,
               std::move(note));
}

std::vector<SDLawSpec> experiment_laws(const ExperimentConfig& cfg,
                                       std::vector<SDLawSpec> defaults) {
  if (!cfg.law.is_null()) return {catalog::from_json(cfg.law)};
  return defaults;
}

SampleBatch centered(SampleBatch batch, const Vec& mean) {
  batch.points.rowwise() -= mean.transpose();
  return batch;
}

// Y = e^{-t0} X' + innovation draw: by self-decomposition this reproduces the
// target law from fresh randomness.
SampleBatch reassembled_target(const SDLawSpec& law, double t0, int n,
                               std::uint64_t seed) {
  SampleBatch x_prime = sample_target(law, n, seed);
  const SampleBatch innovation = sample_mu_t(law, t0, n, seed + 1);
  x_prime.points = std::exp(-t0) * x_prime.points + innovation.points;
  x_prime.law_id = law.id + "_reassembled";
  return x_prime;
}

std::vector<Vec> probe_frequencies(int dim, std::uint64_t seed, int count = 20) {
  RngStream rng(seed, "frequencies");
  std::vector<Vec> out;
  for (int i = 0; i < count; ++i) {
    Vec xi(dim);
    for (int j = 0; j < dim; ++j) xi[j] = rng.uniform(-3.0, 3.0);
    out.push_back(xi);
  }
  return out;
}

std::vector<SmoothTestFunction> tanh_fields(int dim) {
  std::vector<SmoothTestFunction> fields;
  for (int j = 0; j < dim; ++j) {
    Vec w = Vec::Zero(dim);
    w[j] = 1.0;
    fields.push_back(tanh_ramp_h2(w, 0.3));
  }
  Vec diag = Vec::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
  fields.push_back(tanh_ramp_h2(diag, -0.5));
  return fields;
}

// ---------------------------------------------------------------------------
// catalog-check
// ---------------------------------------------------------------------------
std::vector<CheckRecord> run_catalog_check(const ExperimentConfig& cfg) {
  const auto laws = experiment_laws(cfg, catalog::standard_catalog());
  const int n = cfg.budgets.n_samples;
  const double factor = tolerance(cfg, "cf_gap_factor", 4.0);
  std::vector<std::vector<CheckRecord>> slots(laws.size());

  detail::run_indexed_tasks(static_cast<int>(laws.size()), [&](int idx) {
    const SDLawSpec& law = laws[static_cast<std::size_t>(idx)];
    std::vector<CheckRecord>& out = slots[static_cast<std::size_t>(idx)];
    const AdmissibilityReport rep = check_admissible(law);
    out.push_back(check(law.id + ": admissible", rep.all() ? 1.0 : 0.0, 0.0, 1.0,
                        rep.all(),
                        "sphere_mass=" + std::to_string(rep.sphere_mass)));

    const double threshold = factor / std::sqrt(static_cast<double>(n));
    const auto freqs = probe_frequencies(law.dim(), cfg.seed + idx);

    // sampler CF gaps, with the one-re-seed flake budget
    auto cf_gap_check = [&](const char* tag, auto&& make_batch) {
      double gap = empirical_cf_gap(law, make_batch(cfg.seed + 11 + idx), freqs);
      std::string note;
      if (gap > threshold) {
        gap = empirical_cf_gap(law, make_batch(cfg.seed + 12 + idx), freqs);
        note = "re-seeded once";
      }
      out.push_back(check_leq(law.id + std::string(": cf gap ") + tag, gap, 0.0,
                              threshold, note));
    };
    cf_gap_check("target", [&](std::uint64_t s) { return sample_target(law, n, s); });
    cf_gap_check("mu_t(0.7)",
                 [&](std::uint64_t s) { return sample_mu_t(law, 0.7, n, s); });
  });

  std::vector<CheckRecord> checks;
  for (auto& slot : slots) {
    for (auto& c : slot) checks.push_back(std::move(c));
  }
  return checks;
}

// ---------------------------------------------------------------------------
// identity-check: E <X-EX, grad f(X)> = E int <grad f(X+u)-grad f(X), u> nu
// ---------------------------------------------------------------------------
std::vector<CheckRecord> run_identity_check(const ExperimentConfig& cfg) {
  std::vector<SDLawSpec> defaults;
  defaults.push_back(catalog::gamma1d(2.0, 1.0));
  {
    Vec shape(2), rate(2);
    shape << 1.0, 2.0;
    rate << 1.0, 1.0;
    defaults.push_back(catalog::multi_gamma(shape, rate));
  }
  const auto laws = experiment_laws(cfg, std::move(defaults));
  const int n = cfg.budgets.n_samples;
  const double se_factor = tolerance(cfg, "se_factor", 3.0);

  std::vector<CheckRecord> checks;
  for (const SDLawSpec& law : laws) {
    const auto fields = tanh_fields(law.dim());
    for (std::size_t k = 0; k < fields.size(); ++k) {
      const CharacterizationEstimate est =
          characterization_identity(law, fields[k], n, cfg.seed + 17 * k);
      const double bound = se_factor * est.combined_se();
      checks.push_back(check_leq(law.id + ": field " + std::to_string(k),
                                 std::abs(est.gap()), est.combined_se(), bound));
    }
  }
  return checks;
}

// ---------------------------------------------------------------------------
// stein-residual
// ---------------------------------------------------------------------------
std::vector<CheckRecord> run_stein_residual(const ExperimentConfig& cfg) {
  std::vector<SDLawSpec> defaults;
  defaults.push_back(catalog::gamma1d(2.0, 1.0));
  defaults.push_back(catalog::rot_inv_stable(1, 1.5));
  const auto laws = experiment_laws(cfg, std::move(defaults));
  const double tau_q = tolerance(cfg, "tau_q", 1e-2);
  const double se_factor = tolerance(cfg, "se_factor", 3.0);

  std::vector<CheckRecord> checks;
  for (const SDLawSpec& law : laws) {
    SmoothTestFunction h = tanh_ramp(Vec::Ones(1), 0.0, 1.0, 0.5);
    SteinSolveBudget budget;
    budget.n_mc = cfg.budgets.n_mc;
    budget.n_target = cfg.budgets.n_samples;
    budget.nodes_per_panel = cfg.budgets.time_nodes;
    budget.tol = tau_q;
    budget.seed = cfg.seed + 31;
    const SteinSolution solution = solve_stein(law, h, budget);

    const bool positive_support = law.family == Family::MultiGamma;
    const std::vector<double> points =
        positive_support ? std::vector<double>{0.0, 0.5, 1.0, 2.0, 3.0}
                         : std::vector<double>{-2.0, -1.0, 0.0, 1.0, 2.0};
    GeneratorOptions gen;
    gen.tol = tolerance(cfg, "generator_tol", 2e-3);
    for (const double p : points) {
      const ValueWithError res = stein_residual(law, solution, Vec::Constant(1, p), gen);
      const double bound = se_factor * (tau_q + res.se);
      checks.push_back(check_leq(law.id + ": |residual| at x=" + std::to_string(p),
                                 std::abs(res.value), res.se, bound));
    }
  }
  return checks;
}

// ---------------------------------------------------------------------------
// derivative-bounds
// ---------------------------------------------------------------------------
std::vector<CheckRecord> run_derivative_bounds(const ExperimentConfig& cfg) {
  std::vector<SDLawSpec> defaults;
  defaults.push_back(catalog::gamma1d(2.0, 1.0));
  {
    Vec shape(2), rate(2);
    shape << 1.0, 2.0;
    rate << 1.0, 1.0;
    defaults.push_back(catalog::multi_gamma(shape, rate));
  }
  const auto laws = experiment_laws(cfg, std::move(defaults));
  const double se_factor = tolerance(cfg, "se_factor", 2.0);

  std::vector<CheckRecord> checks;
  for (const SDLawSpec& law : laws) {
    const int d = law.dim();
    Vec w = Vec::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
    SmoothTestFunction h = tanh_ramp_h2(w, 0.25);

    SteinSolveBudget budget;
    budget.n_mc = std::min(cfg.budgets.n_mc, 8000);
    budget.n_target = cfg.budgets.n_samples;
    budget.nodes_per_panel = cfg.budgets.time_nodes;
    budget.tol = 1e-2;
    budget.seed = cfg.seed + 41;
    const SteinSolution solution = solve_stein(law, h, budget);

    // grid: half law samples, half lattice around the mean
    std::vector<Vec> grid;
    {
      const SampleBatch batch = sample_target(law, 500, cfg.seed + 42);
      for (int i = 0; i < batch.n(); ++i) grid.push_back(batch.points.row(i).transpose());
      const double scale = std::sqrt(std::max(1e-9, levy_moment(law, LevyMoment::M2Total)));
      RngStream rng(cfg.seed + 43, "grid");
      for (int i = 0; i < 500; ++i) {
        Vec x(d);
        for (int j = 0; j < d; ++j) x[j] = law.mean[j] + rng.uniform(-4.0, 4.0) * scale;
        grid.push_back(x);
      }
    }

    double grad_max = 0.0, grad_max_se = 0.0;
    double norm_max = 0.0, norm_max_se = 0.0;
    double hess_max = 0.0, hess_max_se = 0.0;
    for (const Vec& x : grid) {
      const Mat gblocks = solution.gradient_blocks(x);
      const Vec g = gblocks.rowwise().mean();
      const int B = static_cast<int>(gblocks.cols());
      for (int j = 0; j < d; ++j) {
        double var = 0.0;
        for (int b = 0; b < B; ++b) var += std::pow(gblocks(j, b) - g[j], 2);
        const double se = std::sqrt(var / ((B - 1.0) * B));
        if (std::abs(g[j]) > grad_max) {
          grad_max = std::abs(g[j]);
          grad_max_se = se;
        }
      }
      if (g.norm() > norm_max) {
        Vec block_norms(B);
        for (int b = 0; b < B; ++b) block_norms[b] = gblocks.col(b).norm();
        const double bm = block_norms.mean();
        const double var = (block_norms.array() - bm).square().sum() / (B - 1);
        norm_max = g.norm();
        norm_max_se = std::sqrt(var / B);
      }
      const Mat hblocks = solution.hessian_blocks(x);
      const Vec hmean = hblocks.rowwise().mean();
      for (int e = 0; e < d * d; ++e) {
        double var = 0.0;
        for (int b = 0; b < B; ++b) var += std::pow(hblocks(e, b) - hmean[e], 2);
        const double se = std::sqrt(var / ((B - 1.0) * B));
        if (std::abs(hmean[e]) > hess_max) {
          hess_max = std::abs(hmean[e]);
          hess_max_se = se;
        }
      }
    }
    checks.push_back(check_leq(law.id + ": sup |d_j f_h|", grad_max, grad_max_se,
                               1.0 + se_factor * grad_max_se));
    checks.push_back(check_leq(law.id + ": sup ||grad f_h||", norm_max, norm_max_se,
                               std::sqrt(static_cast<double>(d)) + se_factor * norm_max_se));
    checks.push_back(check_leq(law.id + ": sup |d2_ij f_h|", hess_max, hess_max_se,
                               0.5 + se_factor * hess_max_se));
  }
  return checks;
}

// ---------------------------------------------------------------------------
// semigroup-laws: composition, invariance, t = 0 identity
// ---------------------------------------------------------------------------
std::vector<CheckRecord> run_semigroup_laws(const ExperimentConfig& cfg) {
  std::vector<SDLawSpec> defaults;
  defaults.push_back(catalog::gamma1d(2.0, 1.0));
  const auto laws = experiment_laws(cfg, std::move(defaults));
  const int n = cfg.budgets.n_samples;
  const double se_factor = tolerance(cfg, "se_factor", 3.0);

  std::vector<CheckRecord> checks;
  for (const SDLawSpec& law : laws) {
    const int d = law.dim();
    const SmoothTestFunction h = tanh_fields(d).back();
    const double scale = std::sqrt(std::max(1e-9, levy_moment(law, LevyMoment::M2Total)));
    const Vec x = law.mean + Vec::Constant(d, 0.7 * scale);

    // t = 0: mu_0 is a point mass at the origin, so P_0 h(x) = h(x) exactly
    {
      SemigroupBudget b;
      b.n_mc = 1000;
      b.seed = cfg.seed + 51;
      const ValueWithError p0 = apply_semigroup(law, h, 0.0, x, SemigroupRoute::MonteCarlo, b);
      checks.push_back(check_leq(law.id + ": t=0 identity",
                                 std::abs(p0.value - h.value(x)), 0.0, 1e-12));
    }

    // composition P_t(P_s h)(x) = P_{s+t} h(x), paired-draw estimator
    for (const auto& [s, t] : std::vector<std::pair<double, double>>{{0.3, 0.7}, {1.0, 1.0}}) {
      const SampleBatch inner = sample_mu_t(law, s, n, cfg.seed + 61);
      const SampleBatch outer = sample_mu_t(law, t, n, cfg.seed + 62);
      double sum = 0.0, sum2 = 0.0;
      const double es = std::exp(-s), est_ = std::exp(-(s + t));
      for (int i = 0; i < n; ++i) {
        const Vec arg = inner.points.row(i).transpose() +
                        es * outer.points.row(i).transpose() + est_ * x;
        const double v = h.value(arg);
        sum += v;
        sum2 += v * v;
      }
      const double lhs = sum / n;
      const double lhs_se = std::sqrt(std::max(0.0, sum2 / n - lhs * lhs) / n);
      SemigroupBudget b;
      b.n_mc = n;
      b.seed = cfg.seed + 63;
      const ValueWithError rhs =
          apply_semigroup(law, h, s + t, x, SemigroupRoute::MonteCarlo, b);
      const double combined = std::sqrt(lhs_se * lhs_se + rhs.se * rhs.se);
      checks.push_back(check_leq(law.id + ": composition s=" + std::to_string(s) +
                                     " t=" + std::to_string(t),
                                 std::abs(lhs - rhs.value), combined,
                                 se_factor * combined));
    }

    // invariance: E P_t h(X) = E h(X)
    for (const double t : {0.5, 1.0, 2.0}) {
      const SampleBatch target = sample_target(law, n, cfg.seed + 71);
      const SampleBatch innovation = sample_mu_t(law, t, n, cfg.seed + 72);
      double sum = 0.0, sum2 = 0.0;
      const double et = std::exp(-t);
      for (int i = 0; i < n; ++i) {
        const double v = h.value(Vec(innovation.points.row(i).transpose() +
                                     et * target.points.row(i).transpose()));
        sum += v;
        sum2 += v * v;
      }
      const double lhs = sum / n;
      const double lhs_se = std::sqrt(std::max(0.0, sum2 / n - lhs * lhs) / n);
      const SampleBatch fresh = sample_target(law, n, cfg.seed + 73);
      double rsum = 0.0, rsum2 = 0.0;
      for (int i = 0; i < n; ++i) {
        const double v = h.value(fresh.points.row(i).transpose());
        rsum += v;
        rsum2 += v * v;
      }
      const double rhs = rsum / n;
      const double rhs_se = std::sqrt(std::max(0.0, rsum2 / n - rhs * rhs) / n);
      const double combined = std::sqrt(lhs_se * lhs_se + rhs_se * rhs_se);
      checks.push_back(check_leq(law.id + ": invariance t=" + std::to_string(t),
                                 std::abs(lhs - rhs), combined, se_factor * combined));
    }
  }
  return checks;
}

// ---------------------------------------------------------------------------
// discrepancy-bound: W2(X, Y) <= (d/2) sqrt(m2) S(tau-hat) + errors
// ---------------------------------------------------------------------------
std::vector<CheckRecord> run_discrepancy_bound(const ExperimentConfig& cfg) {
  std::vector<SDLawSpec> defaults;
  defaults.push_back(catalog::gamma1d(2.0, 1.0));
  const auto laws = experiment_laws(cfg, std::move(defaults));
  const double se_factor = tolerance(cfg, "se_factor", 3.0);
  const int n_pair = static_cast<int>(tolerance(cfg, "assignment_n", 2048));

  std::vector<CheckRecord> checks;
  for (const SDLawSpec& law : laws) {
    const double m2 = levy_moment(law, LevyMoment::M2Total);
    const double d = law.dim();
    for (const double t0 : {0.1, 0.3}) {
      // paired clouds for the transport distance
      const SampleBatch x_batch =
          centered(sample_target(law, n_pair, cfg.seed + 81), law.mean);
      const SampleBatch y_batch = centered(
          reassembled_target(law, t0, n_pair, cfg.seed + 82), law.mean);
      const double w2 = wasserstein_empirical(x_batch, y_batch, 2);
      // block spread of the W2 estimate
      double w2_se = 0.0;
      {
        const int blocks = 8, bs = n_pair / 8;
        double sum = 0.0, sum2 = 0.0;
        for (int b = 0; b < blocks; ++b) {
          SampleBatch xa = x_batch, yb = y_batch;
          xa.points = x_batch.points.middleRows(b * bs, bs).eval();
          yb.points = y_batch.points.middleRows(b * bs, bs).eval();
          const double w = wasserstein_empirical(xa, yb, 2);
          sum += w;
          sum2 += w * w;
        }
        const double bm = sum / blocks;
        w2_se = std::sqrt(std::max(0.0, sum2 / blocks - bm * bm) / blocks);
      }

      // empirical floor of the two-sample W2 estimator: the population
      // distance is what the theorem bounds, and the plug-in estimate sits
      // above it by the self-distance of equal clouds
      const double w2_floor = wasserstein_empirical(
          centered(sample_target(law, n_pair, cfg.seed + 86), law.mean),
          centered(sample_target(law, n_pair, cfg.seed + 87), law.mean), 2);

      // Galerkin kernel on a large Y cloud of the same construction
      const SampleBatch y_large = centered(
          reassembled_target(law, t0, cfg.budgets.n_samples, cfg.seed + 83), law.mean);
      GalerkinOptions gopt;
      gopt.n_nu = std::max(cfg.budgets.n_samples, 200000);
      gopt.seed = cfg.seed + 84;
      const auto [tau, system] = galerkin_solve(
          law, y_large, default_vector_basis(law.dim(), 3, std::sqrt(m2)), gopt);

      NuEstimateBudget dbudget;
      dbudget.n = std::max(cfg.budgets.n_samples, 200000);
      dbudget.seed = cfg.seed + 85;
      const ValueWithError s_hat = discrepancy(law, y_large, tau, dbudget);

      const double rhs = 0.5 * d * std::sqrt(m2) * s_hat.value;
      const double combined =
          std::sqrt(w2_se * w2_se + std::pow(0.5 * d * std::sqrt(m2) * s_hat.se, 2));
      checks.push_back(check_leq(
          law.id + ": W2 <= (d/2) sqrt(m2) S, t0=" + std::to_string(t0), w2, w2_se,
          rhs + se_factor * combined + w2_floor,
          "S_hat=" + std::to_string(s_hat.value) +
              ", estimator_floor=" + std::to_string(w2_floor)));
    }
  }
  return checks;
}

// ---------------------------------------------------------------------------
// galerkin-kernel: Y ~ X sanity
// ---------------------------------------------------------------------------
std::vector<CheckRecord> run_galerkin_kernel(const ExperimentConfig& cfg) {
  std::vector<SDLawSpec> defaults;
  defaults.push_back(catalog::gamma1d(2.0, 1.0));
  const auto laws = experiment_laws(cfg, std::move(defaults));
  const double se_factor = tolerance(cfg, "se_factor", 3.0);
  const double s_tol = tolerance(cfg, "discrepancy_tol", 1e-2);

  std::vector<CheckRecord> checks;
  for (const SDLawSpec& law : laws) {
    const double m2 = levy_moment(law, LevyMoment::M2Total);
    // the kernel's coefficient noise scales like 1/sqrt(cloud size); the
    // 1e-2 discrepancy gate needs a large fixed point cloud
    const int n_cloud = std::max(8 * cfg.budgets.n_samples, 800000);
    const SampleBatch y_batch =
        centered(sample_target(law, n_cloud, cfg.seed + 91), law.mean);

    GalerkinOptions gopt;
    gopt.n_nu = std::max(8 * cfg.budgets.n_samples, 800000);
    gopt.seed = cfg.seed + 92;
    const auto [tau, system] = galerkin_solve(
        law, y_batch, default_vector_basis(law.dim(), 3, std::sqrt(m2)), gopt);

    NuEstimateBudget budget;
    budget.n = std::max(2 * cfg.budgets.n_samples, 200000);
    budget.seed = cfg.seed + 93;

    const ValueWithError s_hat = discrepancy(law, y_batch, tau, budget);
    checks.push_back(check_leq(law.id + ": S(galerkin kernel)", s_hat.value, s_hat.se,
                               s_tol + se_factor * s_hat.se));

    // Galerkin optimality: no worse than the identity field in the span
    {
      NuEstimateBudget b2 = budget;
      b2.seed = cfg.seed + 94;
      const ValueWithError s_id =
          discrepancy(law, y_batch, identity_kernel(law.dim()), b2);
      const double combined = std::sqrt(s_hat.se * s_hat.se + s_id.se * s_id.se);
      checks.push_back(check_leq(law.id + ": S(kernel) <= S(identity) + tol + 3se",
                                 s_hat.value, s_hat.se,
                                 s_id.value + s_tol + se_factor * combined,
                                 "S_identity=" + std::to_string(s_id.value)));
    }

    // energy identity A(tau, tau) = L(tau)
    NuEstimateBudget b3 = budget;
    b3.seed = cfg.seed + 95;
    const ValueWithError energy = kernel_energy(law, y_batch, tau, b3);
    const ValueWithError load = kernel_load(y_batch, tau);
    const double combined = std::sqrt(energy.se * energy.se + load.se * load.se);
    checks.push_back(check_leq(law.id + ": |A(tau,tau) - L(tau)|",
                               std::abs(energy.value - load.value), combined,
                               se_factor * combined));

    // kernel-energy bound with U_Y = 1
    double ey2 = 0.0, ey2_sq = 0.0;
    for (int i = 0; i < y_batch.n(); ++i) {
      const double v = y_batch.points.row(i).squaredNorm();
      ey2 += v;
      ey2_sq += v * v;
    }
    ey2 /= y_batch.n();
    const double ey2_se = std::sqrt(
        std::max(0.0, ey2_sq / y_batch.n() - ey2 * ey2) / y_batch.n());
    const double combined2 = std::sqrt(energy.se * energy.se + ey2_se * ey2_se);
    checks.push_back(check_leq(law.id + ": A(tau,tau) <= U E||Y||^2", energy.value,
                               energy.se, ey2 + se_factor * combined2));
  }
  return checks;
}

// ---------------------------------------------------------------------------
// poincare: Rayleigh ratios at the fixed point Y ~ X
// ---------------------------------------------------------------------------
std::vector<CheckRecord> run_poincare(const ExperimentConfig& cfg) {
  std::vector<SDLawSpec> defaults;
  defaults.push_back(catalog::gamma1d(2.0, 1.0));
  {
    Vec shape(2), rate(2);
    shape << 1.0, 2.0;
    rate << 1.0, 1.0;
    defaults.push_back(catalog::multi_gamma(shape, rate));
  }
  const auto laws = experiment_laws(cfg, std::move(defaults));
  const double se_factor = tolerance(cfg, "se_factor", 3.0);

  std::vector<CheckRecord> checks;
  for (const SDLawSpec& law : laws) {
    const SampleBatch y_batch =
        centered(sample_target(law, cfg.budgets.n_samples, cfg.seed + 96), law.mean);

    const TestFunctionDictionary dict =
        TestFunctionDictionary::standard(law.dim(), 8, cfg.seed + 97);
    PoincareBudget budget;
    budget.n_nu = std::max(2 * cfg.budgets.n_samples, 200000);
    budget.seed = cfg.seed + 98;
    const PoincareResult result =
        poincare_ratio(y_batch, law.levy, dict.certified(1), budget);

    for (const auto& probe : result.detail) {
      checks.push_back(check_leq(law.id + ": ratio(" + probe.name + ") <= 1",
                                 probe.ratio, probe.se,
                                 1.0 + se_factor * probe.se));
    }
    for (int j = 0; j < law.dim(); ++j) {
      const auto& probe = result.detail[static_cast<std::size_t>(j)];
      checks.push_back(check_leq(law.id + ": |ratio(" + probe.name + ") - 1|",
                                 std::abs(probe.ratio - 1.0), probe.se,
                                 se_factor * probe.se));
    }
  }
  return checks;
}

// ---------------------------------------------------------------------------
// smoothing-rate
// ---------------------------------------------------------------------------
std::vector<CheckRecord> run_smoothing_rate(const ExperimentConfig& cfg) {
  const auto laws = experiment_laws(cfg, catalog::standard_catalog());
  const int n = static_cast<int>(tolerance(cfg, "assignment_n", 1024));
  const double se_factor = tolerance(cfg, "se_factor", 3.0);
  const std::vector<double> grid = {0.25, 0.5, 1.0, 2.0, 3.0, 4.5, 6.0};

  std::vector<SmoothingCurve> curves(laws.size());
  detail::run_indexed_tasks(static_cast<int>(laws.size()), [&](int idx) {
    curves[static_cast<std::size_t>(idx)] =
        smoothing_curve(laws[static_cast<std::size_t>(idx)], grid, n,
                        cfg.seed + 7 * idx);
  });

  std::vector<CheckRecord> checks;
  for (std::size_t li = 0; li < laws.size(); ++li) {
    const SDLawSpec& law = laws[li];
    const SmoothingCurve& curve = curves[li];
    if (!cfg.output_dir.empty()) {
      curve.write_csv(cfg.output_dir + "/smoothing_" + law.id + ".csv");
    }

    bool monotone = true;
    for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
      const auto& a = curve.points[i];
      const auto& b = curve.points[i + 1];
      if (b.w1 > a.w1 + se_factor * (a.se + b.se) + 0.25 * curve.self_floor) {
        monotone = false;
      }
    }
    checks.push_back(check(law.id + ": W1 decreasing within noise",
                           monotone ? 1.0 : 0.0, 0.0, 1.0, monotone,
                           "slope=" + std::to_string(curve.fitted_slope)));
    checks.push_back(check(law.id + ": finite fitted C_d", curve.c_hat, 0.0, kInf,
                           std::isfinite(curve.c_hat) && curve.c_hat > 0.0,
                           "rate=" + std::to_string(curve.paper_rate)));
    if (law.family == Family::RotInvStable || law.family == Family::SymmetricStable) {
      double worst = 0.0, allowance = 0.0;
      for (const auto& pt : curve.points) {
        const double gap = std::abs(pt.w1 - pt.coupling_oracle);
        if (gap - se_factor * (pt.se + curve.self_floor) >
            worst - allowance) {
          worst = gap;
          allowance = se_factor * (pt.se + curve.self_floor);
        }
      }
      checks.push_back(check_leq(law.id + ": scaling-coupling match", worst, 0.0,
                                 allowance,
                                 "floor=" + std::to_string(curve.self_floor)));
    }
  }
  return checks;
}

// ---------------------------------------------------------------------------
// distance-ordering: d_W2 lb <= d_W1 lb <= W1 <= W2
// ---------------------------------------------------------------------------
std::vector<CheckRecord> run_distance_ordering(const ExperimentConfig& cfg) {
  std::vector<SDLawSpec> defaults;
  defaults.push_back(catalog::gamma1d(2.0, 1.0));
  defaults.push_back(catalog::rot_inv_stable(1, 1.5));
  const auto laws = experiment_laws(cfg, std::move(defaults));
  const int n = static_cast<int>(tolerance(cfg, "assignment_n", 512));
  const double slack = tolerance(cfg, "slack", 1e-10);

  std::vector<CheckRecord> checks;
  for (const SDLawSpec& law : laws) {
    const TestFunctionDictionary dict =
        TestFunctionDictionary::standard(law.dim(), 32, cfg.seed + 5);
    for (int rep = 0; rep < 3; ++rep) {
      const SampleBatch a = sample_target(law, n, cfg.seed + 100 + rep);
      const SampleBatch b = sample_mu_t(law, 1.0, n, cfg.seed + 200 + rep);
      const double lb2 = smooth_wasserstein_lb(a, b, 2, dict);
      const double lb1 = smooth_wasserstein_lb(a, b, 1, dict);
      const double w1 = wasserstein_empirical(a, b, 1);
      const double w2 = wasserstein_empirical(a, b, 2);
      const std::string tag = law.id + " rep " + std::to_string(rep);
      checks.push_back(check_leq(tag + ": lb2 <= lb1", lb2, 0.0, lb1 + slack));
      checks.push_back(check_leq(tag + ": lb1 <= W1", lb1, 0.0, w1 + slack));
      checks.push_back(check_leq(tag + ": W1 <= W2", w1, 0.0, w2 + slack));
    }
  }
  return checks;
}

// ---------------------------------------------------------------------------
// convergence-sequence: smooth-W2 gap along Y_n = mu_{t_n} draws
// ---------------------------------------------------------------------------
std::vector<CheckRecord> run_convergence_sequence(const ExperimentConfig& cfg) {
  std::vector<SDLawSpec> defaults;
  defaults.push_back(catalog::gamma1d(2.0, 1.0));
  const auto laws = experiment_laws(cfg, std::move(defaults));
  const double se_factor = tolerance(cfg, "se_factor", 3.0);
  const std::vector<double> ts = {0.5, 1.0, 2.0, 4.0, 8.0};
  const int n = cfg.budgets.n_samples;

  std::vector<CheckRecord> checks;
  for (const SDLawSpec& law : laws) {
    const TestFunctionDictionary dict =
        TestFunctionDictionary::standard(law.dim(), 24, cfg.seed + 6);

    // split selection: the argmax function is chosen on one half of the data
    // and the reported gap/SE come from the other half
    std::vector<double> gaps, ses;
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const SampleBatch x_all = sample_target(law, 2 * n, cfg.seed + 300 + k);
      const SampleBatch y_all = sample_mu_t(law, ts[k], 2 * n, cfg.seed + 400 + k);
      SampleBatch x_sel = x_all, x_eval = x_all, y_sel = y_all, y_eval = y_all;
      x_sel.points = x_all.points.topRows(n).eval();
      y_sel.points = y_all.points.topRows(n).eval();
      x_eval.points = x_all.points.bottomRows(n).eval();
      y_eval.points = y_all.points.bottomRows(n).eval();

      const SmoothLbDetail sel = smooth_wasserstein_lb_detail(x_sel, y_sel, 2, dict);
      // evaluate the selected function on the held-out half
      double gap = 0.0, se = 0.0;
      for (const auto& f : dict.members()) {
        if (f.name != sel.argmax_name) continue;
        double ma = 0.0, mb = 0.0, qa = 0.0, qb = 0.0;
        for (int i = 0; i < n; ++i) {
          const double va = f.value(x_eval.points.row(i).transpose());
          const double vb = f.value(y_eval.points.row(i).transpose());
          ma += va;
          mb += vb;
          qa += va * va;
          qb += vb * vb;
        }
        ma /= n;
        mb /= n;
        gap = std::abs(ma - mb);
        se = std::sqrt(std::max(0.0, qa / n - ma * ma) / n +
                       std::max(0.0, qb / n - mb * mb) / n);
        break;
      }
      gaps.push_back(gap);
      ses.push_back(se);
      checks.push_back(check(law.id + ": d_W2 lb at t=" + std::to_string(ts[k]), gap,
                             se, kInf, true, "selected " + sel.argmax_name));
    }
    bool monotone = true;
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
      if (gaps[k + 1] > gaps[k] + se_factor * (ses[k] + ses[k + 1])) monotone = false;
    }
    checks.push_back(check(law.id + ": decreasing within noise", monotone ? 1.0 : 0.0,
                           0.0, 1.0, monotone));
    checks.push_back(check_leq(law.id + ": final gap <= 2 SE", gaps.back(),
                               ses.back(), 2.0 * ses.back()));
  }
  return checks;
}

}  // namespace

ExperimentRegistry::ExperimentRegistry() {
  auto add = [&](std::string id, std::string description, std::string anchor,
                 Runner runner) {
    entries_[id] = Entry{{id, std::move(description), std::move(anchor)},
                         std::move(runner)};
  };
  add("catalog-check",
      "admissibility checks and sampler characteristic-function validation for "
      "the full law catalog",
      "polar decomposition admissibility conditions", run_catalog_check);
  add("identity-check",
      "two-sided Monte Carlo verification of the generator characterization "
      "identity under the target law",
      "generator characterizing identity", run_identity_check);
  add("stein-residual",
      "residual of the non-local Stein equation at probe points",
      "Stein equation and its semigroup solution", run_stein_residual);
  add("derivative-bounds",
      "gradient and Hessian bounds of the Stein solution over a point grid",
      "derivative bounds for the Stein solution", run_derivative_bounds);
  add("semigroup-laws", "semigroup composition, invariance, and the t=0 identity",
      "semigroup composition and invariance", run_semigroup_laws);
  add("discrepancy-bound",
      "empirical W2 against the kernel-discrepancy transport bound",
      "discrepancy-to-W2 transport bound", run_discrepancy_bound);
  add("galerkin-kernel",
      "Galerkin kernel sanity at the fixed point Y ~ X: discrepancy, energy "
      "identity, kernel-energy bound",
      "variational existence of Stein kernels", run_galerkin_kernel);
  add("poincare",
      "Rayleigh ratios of the jump Dirichlet form at the fixed point",
      "infinitely divisible Poincare inequality", run_poincare);
  add("smoothing-rate",
      "decay of W1(X, X_t) against the exponential envelope, with the "
      "scaling-coupling oracle for stable laws",
      "smooth-Wasserstein smoothing rate", run_smoothing_rate);
  add("distance-ordering",
      "estimator bracket: dictionary d_W2 <= d_W1 <= W1 <= W2",
      "Wasserstein ordering chain", run_distance_ordering);
  add("convergence-sequence",
      "smooth-W2 gap decay along the interpolation sequence towards the target",
      "convergence under Poincare constants tending to one", run_convergence_sequence);
}

const ExperimentRegistry& ExperimentRegistry::instance() {
  static ExperimentRegistry registry;
  return registry;
}

std::vector<ExperimentDescriptor> ExperimentRegistry::list() const {
  std::vector<ExperimentDescriptor> out;
  for (const auto& [id, entry] : entries_) out.push_back(entry.descriptor);
  return out;
}

bool ExperimentRegistry::contains(const std::string& id) const {
  return entries_.count(id) > 0;
}

ExperimentReport ExperimentRegistry::run(const ExperimentConfig& config) const {
  const auto it = entries_.find(config.experiment);
  if (it == entries_.end()) {
    throw UnknownExperiment("no experiment named '" + config.experiment + "'");
  }
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.config_echo = config.to_json();
  report.library_version = kVersion;
  report.checks = it->second.runner(config);
  report.wall_clock_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  if (!config.output_dir.empty()) report.write(config.output_dir);
  return report;
}

}  // namespace sdstein
