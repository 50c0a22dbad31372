#pragma once

// Empirical transport distances and smooth-Wasserstein brackets.
//
//   W_p(A, B) = (min over permutations (1/n) sum ||a_i - b_{s(i)}||^p)^{1/p}
// by exact assignment. The smooth distance d_{W_r} is reported as a bracket:
// a certified-dictionary lower bound max_h |mean_A h - mean_B h| together
// with the W_1 upper bound from the ordering
//   d_{W_r} <= d_{W_1} <= W_1 <= W_p.

#include <string>
#include <vector>

#include "sdstein/sampling.hpp"
#include "sdstein/test_functions.hpp"

namespace sdstein {

/// Exact empirical Wasserstein-p between equal-size batches, p in {1, 2},
/// n <= 4096 (assignment cost grows cubically).
double wasserstein_empirical(const SampleBatch& a, const SampleBatch& b, int p);

/// Dictionary lower bound for d_{W_r}: max over certified H_r members of the
/// absolute mean difference.
double smooth_wasserstein_lb(const SampleBatch& a, const SampleBatch& b, int r,
                             const TestFunctionDictionary& dictionary);

/// Same bound with the per-function detail (mean gap and its SE), used by the
/// convergence-sequence experiment.
struct SmoothLbDetail {
  double bound = 0.0;
  double argmax_se = 0.0;
  std::string argmax_name;
};
SmoothLbDetail smooth_wasserstein_lb_detail(const SampleBatch& a, const SampleBatch& b,
                                            int r, const TestFunctionDictionary& dictionary);

struct SmoothingPoint {
  double t = 0.0;
  double w1 = 0.0;
  double se = 0.0;               // spread of block W1 estimates
  double coupling_oracle = 0.0;  // (1 - (1-e^{-alpha t})^{1/alpha}) mean||X||,
                                 // stable laws only (NaN otherwise)
  double paper_envelope = 0.0;   // c_hat e^{-t rate}
};

struct SmoothingCurve {
  std::vector<SmoothingPoint> points;
  double fitted_slope = 0.0;  // regression slope of log W1 on t
  double c_hat = 0.0;         // smallest C with W1(t) <= C e^{-t rate} on the grid
  double paper_rate = 0.0;    // 1 / (2^{d+1} (d+1))
  double self_floor = 0.0;    // two-sample W1 of the target law against itself

  void write_csv(const std::string& path) const;
};

/// Empirical W_1(X, X_t) over the t grid with block standard errors, the
/// fitted exponential envelope, and the stable-law coupling oracle.
SmoothingCurve smoothing_curve(const SDLawSpec& law, const std::vector<double>& t_grid,
                               int n, std::uint64_t seed, int se_blocks = 8);

}  // namespace sdstein
