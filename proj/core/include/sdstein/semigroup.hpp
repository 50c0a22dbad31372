#pragma once

// The Ornstein-Uhlenbeck-like semigroup of a self-decomposable law, its
// generator, and the solution of the associated non-local Stein equation.
//
//   (P_t h)(x) = E h(U_t + e^{-t} x),  U_t ~ mu_t
//   (A f)(x)   = <EX - x, grad f(x)> + int <grad f(x+u) - grad f(x), u> nu(du)
//   f_h(x)     = -int_0^inf (P_t h(x) - E h(X)) dt
//
// Derivatives of f_h use the commutation relation d_j P_t h = e^{-t} P_t d_j h,
// so gradients and Hessians are time integrals of semigroup evaluations of
// the test function's own derivatives (never finite differences of f_h).
// Monte Carlo estimates share one innovation path per sample across all time
// nodes (common random numbers), which makes the t-integrand smooth.

#include <optional>

#include "sdstein/levy_model.hpp"
#include "sdstein/sampling.hpp"
#include "sdstein/test_functions.hpp"

namespace sdstein {

enum class SemigroupRoute { MonteCarlo, Fourier };

struct SemigroupBudget {
  int n_mc = 20000;
  std::uint64_t seed = 1;
  int fourier_points = 0;  // 0: pick 1024 (d=1), 128 (d=2), 32 (d=3)
};

/// One semigroup evaluation (P_t h)(x) with a standard error (MC route) or a
/// zero SE (deterministic Fourier route).
ValueWithError apply_semigroup(const SDLawSpec& law, const SmoothTestFunction& h,
                               double t, const Vec& x, SemigroupRoute route,
                               const SemigroupBudget& budget = {});

struct GeneratorOptions {
  double tol = 1e-3;          // jump-integral quadrature budget
  int sphere_resolution = 32;
  int nodes_per_panel = 8;
  int max_far_panels = 25;    // continuation cap for heavy tails
};

/// Generator applied to a certified smooth function (deterministic
/// quadrature; the returned SE is zero).
ValueWithError generator_apply(const SDLawSpec& law, const SmoothTestFunction& f,
                               const Vec& x, const GeneratorOptions& options = {});

struct SteinSolveBudget {
  int n_mc = 20000;       // innovation draws per time node
  int n_target = 100000;  // target draws behind E h(X)
  int nodes_per_panel = 8;
  double tol = 1e-2;      // requested quadrature tolerance tau_q
  std::optional<double> t_max_override;
  std::uint64_t seed = 1;
  int se_blocks = 10;
};

/// The solved Stein equation: f_h with gradient and Hessian evaluators backed
/// by shared innovation-path caches. Block-resolved evaluators expose the
/// jackknife decomposition used for standard errors downstream.
class SteinSolution {
 public:
  SteinSolution(SDLawSpec law, SmoothTestFunction h, SteinSolveBudget budget);

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;

  /// d x B matrix whose column b is the gradient estimate from sample block b.
  Mat gradient_blocks(const Vec& x) const;
  /// Gradient standard error (per coordinate) from the block spread.
  Vec gradient_se(const Vec& x) const;
  /// Hessian estimates per block, flattened d*d x B.
  Mat hessian_blocks(const Vec& x) const;

  double e_h() const { return e_h_; }
  double e_h_se() const { return e_h_se_; }
  const Vec& e_h_block_values() const { return e_h_blocks_; }

  double t_max() const { return ts_.back(); }
  double tol() const { return budget_.tol; }
  int blocks() const { return budget_.se_blocks; }
  const SDLawSpec& law() const { return law_; }
  const SmoothTestFunction& test_function() const { return h_; }
  double fitted_decay_rate() const { return fitted_rate_; }
  double fitted_decay_constant() const { return fitted_constant_; }

 private:
  SDLawSpec law_;
  SmoothTestFunction h_;
  SteinSolveBudget budget_;
  std::vector<double> ts_, ws_;  // composite Gauss-Legendre nodes on [0, T]
  std::optional<InnovationPaths> paths_;
  double e_h_ = 0.0, e_h_se_ = 0.0;
  Vec e_h_blocks_;
  double fitted_rate_ = 0.0, fitted_constant_ = 0.0;
};

inline SteinSolution solve_stein(SDLawSpec law, SmoothTestFunction h,
                                 SteinSolveBudget budget = {}) {
  return SteinSolution(std::move(law), std::move(h), std::move(budget));
}

/// A(f_h)(x) - (h(x) - E h(X)) with the SE propagated through matched sample
/// blocks of the solution caches.
ValueWithError stein_residual(const SDLawSpec& law, const SteinSolution& solution,
                              const Vec& x, const GeneratorOptions& options = {});

/// E A(f)(X) estimated over a target sample: the characterization identity
/// says this vanishes for the law's own distribution. Drift and jump sides
/// are returned separately with a combined SE.
struct CharacterizationEstimate {
  double drift_side = 0.0;   // E <X - EX, grad f(X)>
  double jump_side = 0.0;    // E int <grad f(X+u) - grad f(X), u> nu(du)
  double drift_se = 0.0;
  double jump_se = 0.0;
  double gap() const { return drift_side - jump_side; }
  double combined_se() const { return std::sqrt(drift_se * drift_se + jump_se * jump_se); }
};
CharacterizationEstimate characterization_identity(const SDLawSpec& law,
                                                   const SmoothTestFunction& f,
                                                   int n_samples, std::uint64_t seed,
                                                   const GeneratorOptions& options = {});

}  // namespace sdstein
