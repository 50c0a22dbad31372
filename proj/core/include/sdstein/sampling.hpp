#pragma once

// Seeded, reproducible sampling from the target law mu_X and the
// interpolating laws mu_t.
//
// Exact routes:
//   multi_gamma / exp_profile targets: sums of Gamma variates along atoms
//   stable targets: sub-Gaussian (rot. invariant) or per-pair 1-d symmetric
//     stable draws (discrete lambda)
//   stable mu_t: the scaling identity X_t = (1-e^{-alpha t})^{1/alpha} X
//   gamma-type mu_t: Poisson arrivals on (0,t], a rate-theta arrival at time
//     tau contributing the jump (E/beta) e^{-tau}; the arrival process is
//     shared across t values, which is what makes common-random-number
//     evaluation of t -> X_t possible.
// Generic route: compound-Poisson approximation of nu (or nu_t by thinning)
// truncated at radius eps, with the removed small-jump L2 mass recorded.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdstein/levy_model.hpp"

namespace sdstein {

struct SampleBatch {
  Mat points;  // n x d, one sample per row
  std::string law_id;
  std::optional<double> t;  // empty for the target law
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  double truncation_l2_error = 0.0;

  int n() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
};

SampleBatch sample_target(const SDLawSpec& law, int n, std::uint64_t seed);

struct MuTOptions {
  double epsilon = -1.0;  // < 0: pick eps so the recorded L2 error is below
                          // 1e-3 sqrt(m2_small); ignored by exact routes
  std::optional<double> error_budget;
};

SampleBatch sample_mu_t(const SDLawSpec& law, double t, int n, std::uint64_t seed,
                        const MuTOptions& options = {});

/// Compound-Poisson approximation of the ID law with Levy measure nu
/// restricted to jump radii > eps, compensated on (eps, 1].
SampleBatch compound_poisson_approx(const PolarLevyMeasure& nu, double eps, int n,
                                    std::uint64_t seed);

/// X_t evaluated on a whole t-grid with common randomness per sample: the
/// same stable draw, arrival process, or thinned jump set drives every t.
class InnovationPaths {
 public:
  InnovationPaths(const SDLawSpec& law, std::vector<double> ts, int n,
                  std::uint64_t seed, double eps = -1.0);

  const std::vector<double>& ts() const { return ts_; }
  const Mat& at(std::size_t t_index) const { return values_[t_index]; }
  double truncation_l2_error(std::size_t t_index) const { return errors_[t_index]; }
  int n() const { return n_; }

 private:
  std::vector<double> ts_;
  std::vector<Mat> values_;
  std::vector<double> errors_;
  int n_ = 0;
};

/// CSV with a coordinate header row plus a JSON sidecar carrying provenance.
void write_batch_csv(const SampleBatch& batch, const std::string& base_path);
SampleBatch read_batch_csv(const std::string& base_path);

/// Max over the given frequencies of |empirical CF - exp(log_cf)|; the
/// standard sampler acceptance check compares this against 4/sqrt(n).
double empirical_cf_gap(const SDLawSpec& law, const SampleBatch& batch,
                        const std::vector<Vec>& frequencies);

}  // namespace sdstein
