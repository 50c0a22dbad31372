#pragma once

// Stein kernels and discrepancies for infinitely divisible comparison, the
// Galerkin solution of the variational problem, and Poincare-constant
// machinery.
//
//   kernel identity   E <Y, f(Y)> = E int <f(Y+u)-f(Y), tau(Y+u)-tau(Y)> nu(du)
//   discrepancy       S^2(tau) = E int ||tau(Y+u)-tau(Y)-u||^2 nu(du)
//   bilinear form     A(f,g)   = E int <f(Y+u)-f(Y), g(Y+u)-g(Y)> nu(du)
//   load              L(f)     = E <Y, f(Y)>
//
// nu-integrals are estimated by importance sampling against the normalised
// second-moment measure ||u||^2 nu(du) / m2, which keeps every estimator
// finite-variance for infinite-intensity nu. Estimating the Gram matrix from
// shared (y,u) draws makes it symmetric positive semidefinite by construction.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sdstein/levy_model.hpp"
#include "sdstein/rng.hpp"
#include "sdstein/sampling.hpp"
#include "sdstein/test_functions.hpp"

namespace sdstein {

struct VectorField {
  std::function<Vec(const Vec&)> eval;
  std::string name;
};

/// A candidate Stein kernel: either a closed-form vector field or a centered
/// combination sum_j c_j f_j - offset over a basis.
class SteinKernelFn {
 public:
  static SteinKernelFn from_field(VectorField field);
  SteinKernelFn(std::vector<VectorField> basis, Vec coeffs, Vec offset);

  Vec operator()(const Vec& y) const;
  const std::string& name() const { return name_; }

 private:
  SteinKernelFn() = default;
  std::vector<VectorField> basis_;
  Vec coeffs_;
  Vec offset_;
  std::string name_;
};

/// Identity field y -> y, the exact kernel of a law against itself.
SteinKernelFn identity_kernel(int dim);

/// Draws u ~ ||u||^2 nu(du) / m2; throws InfiniteSecondMomentNu when the
/// Levy measure has no second moment.
class NuSecondMomentSampler {
 public:
  explicit NuSecondMomentSampler(const PolarLevyMeasure& nu);
  double m2() const { return m2_; }
  Vec draw(RngStream& rng) const;

 private:
  const PolarLevyMeasure* nu_;
  std::vector<double> atom_probs_;  // cumulative
  double m2_ = 0.0;
};

struct NuEstimateBudget {
  int n = 200000;
  std::uint64_t seed = 1;
};

/// Stein discrepancy estimate sqrt(E ||tau(y+u)-tau(y)-u||^2 nu x mu_Y); an
/// upper bound for the infimum-defined discrepancy.
ValueWithError discrepancy(const SDLawSpec& law_X, const SampleBatch& samples_Y,
                           const SteinKernelFn& tau, const NuEstimateBudget& = {});

/// Fresh estimates of the energy A(tau,tau) and the load L(tau).
ValueWithError kernel_energy(const SDLawSpec& law_X, const SampleBatch& samples_Y,
                             const SteinKernelFn& tau, const NuEstimateBudget& = {});
ValueWithError kernel_load(const SampleBatch& samples_Y, const SteinKernelFn& tau);

struct GalerkinOptions {
  double ridge_factor = 1e-8;  // ridge = factor * trace(A_hat) / m
  int n_nu = 200000;
  std::uint64_t seed = 1;
  double condition_limit = 1e12;
};

struct GalerkinSystem {
  Mat a_hat;
  Vec l_hat;
  Vec coeffs;
  double ridge = 0.0;
  double condition = 0.0;
  std::vector<std::string> basis_names;
  nlohmann::json to_json() const;
};

/// Galerkin restriction of A(f, tau) = L(f) to the span of the basis over the
/// centered sample cloud. Returns the centered kernel and the solved system.
std::pair<SteinKernelFn, GalerkinSystem> galerkin_solve(
    const SDLawSpec& law_X, const SampleBatch& samples_Y_centered,
    const std::vector<VectorField>& basis, const GalerkinOptions& options = {});

/// Coordinate fields, linear fields and Gaussian-bump-modulated coordinate
/// fields; the identity map lies in the span.
std::vector<VectorField> default_vector_basis(int dim, int radial_bumps = 3,
                                              double scale = 1.0);

struct PoincareBudget {
  int n_nu = 200000;
  std::uint64_t seed = 1;
  int blocks = 20;
};

struct PoincareDetail {
  std::string name;
  double ratio = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  double se = 0.0;
};

struct PoincareResult {
  double u_hat = 0.0;  // max Rayleigh ratio: a lower bound for U(Y, nu)
  int argmax = -1;
  std::vector<PoincareDetail> detail;
};

/// Rayleigh ratios Var f(Y) / E int |f(Y+u)-f(Y)|^2 nu(du) over the scalar
/// dictionary; the coordinate functions y_j are always included.
PoincareResult poincare_ratio(const SampleBatch& samples_Y, const PolarLevyMeasure& nu,
                              const std::vector<const SmoothTestFunction*>& dictionary,
                              const PoincareBudget& = {});

enum class PoincareBoundMode { Matched, General };

/// Transport bound from a Poincare constant:
///   matched  (d/2) m2 sqrt(U-1)          (requires E||Y||^2 = m2)
///   general  (d/2) sqrt(m2) sqrt(U E||Y||^2 + m2 - 2 E||Y||^2)
double bound_from_poincare(const SDLawSpec& law_X, const SampleBatch& samples_Y,
                           double u_hat, PoincareBoundMode mode,
                           double moment_match_tol = 0.05);

/// The discrepancy-side byproduct sqrt(U E||Y||^2 + m2 - 2 E||Y||^2).
double discrepancy_bound_from_poincare(const SDLawSpec& law_X,
                                       const SampleBatch& samples_Y, double u_hat);

}  // namespace sdstein
