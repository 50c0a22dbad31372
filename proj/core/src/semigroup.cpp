#include "sdstein/semigroup.hpp"

#include <fftw3.h>

#include "sdstein/detail/fftw_lock.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "sdstein/charfn.hpp"
#include "sdstein/errors.hpp"
#include "sdstein/quadrature.hpp"
#include "sdstein/rng.hpp"

namespace sdstein {

namespace {

using Complex = std::complex<double>;
constexpr Complex kI{0.0, 1.0};

double paper_decay_rate(int dim) {
  return 1.0 / (std::pow(2.0, dim + 1) * (dim + 1));
}

double law_scale(const SDLawSpec& law) {
  if (law.family == Family::RotInvStable || law.family == Family::SymmetricStable) {
    return std::pow(law.stable_scale, 1.0 / law.stable_alpha);
  }
  double m2 = 0.0;
  for (const auto& node : law.levy.direction_nodes()) {
    m2 += node.weight * node.profile->second_moment(0.0, kInf);
    if (law.levy.is_rotationally_invariant()) break;
  }
  return std::isfinite(m2) ? std::sqrt(m2) : 1.0;
}

// ---------------------------------------------------------------------------
// jump integral int <grad f(x + r u) - grad f(x), u> k(r) dr per direction,
// evaluated on a block-resolved gradient field
// ---------------------------------------------------------------------------

struct BlockField {
  int dim = 1;
  int blocks = 1;
  std::function<Mat(const Vec&)> eval;  // d x blocks
  double m1_bound = 1.0;                // sup ||grad f||
  double m2_bound = 1.0;                // sup ||Hess f||_op
};

struct JumpResult {
  Vec per_block;          // block estimates of the jump integral
  double discard_bound;   // quadrature mass given up near 0 and at the far tail
};

// Small-radius cutoff: the discarded inner mass is bounded by
// m2 * int_0^delta r k(r) dr.
double choose_inner_cutoff(const RadialProfile& profile, double m2_bound, double budget) {
  double delta = 0.25;
  for (int i = 0; i < 120; ++i) {
    if (m2_bound * profile.second_moment(0.0, delta) <= budget) return delta;
    delta *= 0.5;
  }
  return delta;
}

JumpResult jump_integral_on_field(const SDLawSpec& law, const BlockField& field,
                                  const Vec& x, const GeneratorOptions& options) {
  const int B = field.blocks;
  JumpResult result;
  result.per_block = Vec::Zero(B);
  result.discard_bound = 0.0;

  const Mat base = field.eval(x);  // d x B
  const QuadratureRule& gl = gauss_legendre(options.nodes_per_panel);
  const auto nodes = law.levy.direction_nodes(options.sphere_resolution);

  for (const auto& node : nodes) {
    const RadialProfile& profile = *node.profile;
    const Vec& dir = node.direction;
    const double weight = node.weight;

    const double delta =
        choose_inner_cutoff(profile, field.m2_bound, 0.05 * options.tol);
    result.discard_bound +=
        weight * field.m2_bound * profile.second_moment(0.0, delta);

    // difference form on [delta, r_mid]: r_mid where the remaining first
    // moment is negligible, capped for heavy tails
    double r_mid = std::min(profile.support_end(), 64.0);
    {
      double r = std::max(1.0, delta * 2.0);
      while (r < r_mid &&
             2.0 * field.m1_bound * profile.first_moment(r, kInf) > 0.05 * options.tol) {
        r *= 2.0;
      }
      r_mid = std::min(r_mid, std::max(r, delta * 2.0));
    }

    Vec acc = Vec::Zero(B);
    double lo = delta;
    while (lo < r_mid) {
      const double hi = std::min(r_mid, lo * 4.0);
      for (int q = 0; q < options.nodes_per_panel; ++q) {
        const double r = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.nodes[q];
        const double w = 0.5 * (hi - lo) * gl.weights[q] * profile(r);
        const Mat shifted = field.eval(x + r * dir);
        for (int b = 0; b < B; ++b) {
          acc[b] += w * dir.dot(shifted.col(b) - base.col(b));
        }
      }
      lo = hi;
    }

    // far tail: split <grad f(x+ru) - grad f(x), u> and integrate the first
    // part by continuation panels (it decays with the field), the second in
    // closed form against the profile's first moment
    const double fm_tail = profile.first_moment(r_mid, kInf);
    if (2.0 * field.m1_bound * fm_tail > 0.05 * options.tol) {
      for (int b = 0; b < B; ++b) acc[b] -= dir.dot(base.col(b)) * fm_tail;
      double flo = r_mid;
      int quiet = 0;
      int panel = 0;
      for (; panel < options.max_far_panels; ++panel) {
        const double fhi = flo * 1.8;
        Vec panel_acc = Vec::Zero(B);
        for (int q = 0; q < options.nodes_per_panel; ++q) {
          const double r = 0.5 * (flo + fhi) + 0.5 * (fhi - flo) * gl.nodes[q];
          const double w = 0.5 * (fhi - flo) * gl.weights[q] * profile(r);
          const Mat shifted = field.eval(x + r * dir);
          for (int b = 0; b < B; ++b) panel_acc[b] += w * dir.dot(shifted.col(b));
        }
        acc += panel_acc;
        const double magnitude = panel_acc.cwiseAbs().maxCoeff();
        if (magnitude < 0.01 * options.tol) {
          if (++quiet >= 2) break;
        } else {
          quiet = 0;
        }
        flo = fhi;
      }
      if (panel >= options.max_far_panels) {
        throw DivergentJumpIntegral(
            "far jump panels did not decay within the continuation budget");
      }
    }

    result.per_block += weight * acc;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Fourier route: P_t h(x) = (2 pi)^-d int F(h)(xi) e^{i e^{-t} <x, xi>}
//                            phi_t(xi) d xi for compactly supported h
// ---------------------------------------------------------------------------

struct SpectralTable {
  std::vector<Complex> fh;  // F(h) on the centred lattice
  double dxi = 0.0;
  int n = 0;
  int dim = 1;
  Complex at(long long flat) const { return fh[static_cast<std::size_t>(flat)]; }
};

SpectralTable tabulate_fourier_transform(const SmoothTestFunction& h, int dim, int n) {
  if (!h.support_radius) {
    throw RouteUnavailable("fourier route needs a compactly supported test function");
  }
  const double box = *h.support_radius * 1.05;
  const double dx = 2.0 * box / n;
  const double dxi = 2.0 * M_PI / (n * dx);

  long long size = 1;
  for (int a = 0; a < dim; ++a) size *= n;
  std::vector<Complex> in(static_cast<std::size_t>(size));
  std::vector<int> idx(dim, 0);
  Vec x(dim);
  for (long long flat = 0; flat < size; ++flat) {
    long long rest = flat;
    int parity = 0;
    for (int a = dim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rest % n);
      rest /= n;
      parity += idx[a];
    }
    for (int a = 0; a < dim; ++a) x[a] = (idx[a] - n / 2) * dx;
    Complex v = h.value(x);
    if (parity % 2 != 0) v = -v;
    in[static_cast<std::size_t>(flat)] = v;
  }

  std::vector<Complex> out(in.size());
  {
    std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
    std::vector<int> shape(dim, n);
    fftw_plan plan = fftw_plan_dft(dim, shape.data(),
                                   reinterpret_cast<fftw_complex*>(in.data()),
                                   reinterpret_cast<fftw_complex*>(out.data()),
                                   FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }

  const double sign_half = ((static_cast<long long>(n) / 2) * dim) % 2 == 0 ? 1.0 : -1.0;
  const double scale = std::pow(dx, dim) * sign_half;
  for (long long flat = 0; flat < size; ++flat) {
    long long rest = flat;
    int parity = 0;
    for (int a = dim - 1; a >= 0; --a) {
      parity += static_cast<int>(rest % n);
      rest /= n;
    }
    out[static_cast<std::size_t>(flat)] *= scale * (parity % 2 == 0 ? 1.0 : -1.0);
  }

  SpectralTable table;
  table.fh = std::move(out);
  table.dxi = dxi;
  table.n = n;
  table.dim = dim;
  return table;
}

double fourier_route(const SDLawSpec& law, const SmoothTestFunction& h, double t,
                     const Vec& x, int n) {
  if (law.dim() > 3) throw RouteUnavailable("fourier route supports d <= 3");
  const int dim = law.dim();
  const SpectralTable table = tabulate_fourier_transform(h, dim, n);

  const double et = std::exp(-t);
  Complex total{0.0, 0.0};
  std::vector<int> idx(dim, 0);
  Vec xi(dim);
  long long size = 1;
  for (int a = 0; a < dim; ++a) size *= n;
  for (long long flat = 0; flat < size; ++flat) {
    long long rest = flat;
    for (int a = dim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rest % n);
      rest /= n;
    }
    for (int a = 0; a < dim; ++a) xi[a] = (idx[a] - n / 2) * table.dxi;
    const Complex phi_t = std::exp(log_cf_ratio(law, xi, t));
    total += table.at(flat) * std::exp(kI * (et * x.dot(xi))) * phi_t;
  }
  total *= std::pow(table.dxi / (2.0 * M_PI), dim);
  return total.real();
}

int default_fourier_points(int dim) {
  switch (dim) {
    case 1: return 1024;
    case 2: return 128;
    default: return 32;
  }
}

}  // namespace

ValueWithError apply_semigroup(const SDLawSpec& law, const SmoothTestFunction& h,
                               double t, const Vec& x, SemigroupRoute route,
                               const SemigroupBudget& budget) {
  if (t < 0.0) throw Error("apply_semigroup: t must be nonnegative");
  if (route == SemigroupRoute::Fourier) {
    const int n = budget.fourier_points > 0 ? budget.fourier_points
                                            : default_fourier_points(law.dim());
    return {fourier_route(law, h, t, x, n), 0.0};
  }
  const SampleBatch batch = sample_mu_t(law, t, budget.n_mc, budget.seed);
  const double et = std::exp(-t);
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < batch.n(); ++i) {
    const double v = h.value(Vec(batch.points.row(i).transpose() + et * x));
    sum += v;
    sum2 += v * v;
  }
  const double n = batch.n();
  const double mean = sum / n;
  const double var = std::max(0.0, sum2 / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

ValueWithError generator_apply(const SDLawSpec& law, const SmoothTestFunction& f,
                               const Vec& x, const GeneratorOptions& options) {
  if (!f.gradient) throw Error("generator_apply: test function needs a gradient");
  BlockField field;
  field.dim = law.dim();
  field.blocks = 1;
  field.m1_bound = std::max(f.m1, 1e-12);
  field.m2_bound = std::max(f.m2, 1e-12);
  field.eval = [&](const Vec& y) { return Mat(f.gradient(y)); };

  const JumpResult jump = jump_integral_on_field(law, field, x, options);
  const double drift = (law.mean - x).dot(f.gradient(x));
  return {drift + jump.per_block[0], 0.0};
}

// ---------------------------------------------------------------------------
// SteinSolution
// ---------------------------------------------------------------------------

SteinSolution::SteinSolution(SDLawSpec law, SmoothTestFunction h, SteinSolveBudget budget)
    : law_(std::move(law)), h_(std::move(h)), budget_(std::move(budget)) {
  if (!h_.gradient || !h_.hessian) {
    throw Error("solve_stein: test function needs gradient and Hessian evaluators");
  }
  const int B = budget_.se_blocks;

  // E h(X) with block decomposition
  {
    const SampleBatch target = sample_target(law_, budget_.n_target, budget_.seed + 101);
    Vec sums = Vec::Zero(B);
    Vec counts = Vec::Zero(B);
    for (int i = 0; i < target.n(); ++i) {
      const int b = i % B;
      sums[b] += h_.value(target.points.row(i).transpose());
      counts[b] += 1.0;
    }
    e_h_blocks_ = sums.cwiseQuotient(counts);
    e_h_ = sums.sum() / counts.sum();
    const double var = (e_h_blocks_.array() - e_h_).square().sum() / (B - 1);
    e_h_se_ = std::sqrt(var / B);
  }

  // truncation horizon from a coarse decay probe, capped by the proven rate
  double t_max = budget_.t_max_override.value_or(0.0);
  {
    const std::vector<double> probe_ts = {0.5, 1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64};
    const int n_probe = 4000;
    InnovationPaths probe(law_, probe_ts, n_probe, budget_.seed + 202);
    const double scale = law_scale(law_);
    std::vector<Vec> probe_points;
    probe_points.push_back(law_.mean);
    Vec bump = Vec::Zero(law_.dim());
    bump[0] = 2.0 * scale;
    probe_points.push_back(law_.mean + bump);
    probe_points.push_back(law_.mean - bump);

    std::vector<double> gap(probe_ts.size(), 0.0), gap_se(probe_ts.size(), 0.0);
    for (std::size_t j = 0; j < probe_ts.size(); ++j) {
      const double et = std::exp(-probe_ts[j]);
      for (const Vec& x0 : probe_points) {
        double sum = 0.0, sum2 = 0.0;
        const Mat& u = probe.at(j);
        for (int i = 0; i < n_probe; ++i) {
          const double v = h_.value(Vec(u.row(i).transpose() + et * x0));
          sum += v;
          sum2 += v * v;
        }
        const double mean = sum / n_probe;
        const double var = std::max(0.0, sum2 / n_probe - mean * mean);
        if (std::abs(mean - e_h_) > gap[j]) {
          gap[j] = std::abs(mean - e_h_);
          gap_se[j] = std::sqrt(var / n_probe);
        }
      }
    }

    const double rate_floor = paper_decay_rate(law_.dim());
    double slope = rate_floor;
    double log_c = 0.0;
    {
      // least squares on log gap over the points that clear the noise floor
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int m = 0;
      for (std::size_t j = 0; j < probe_ts.size(); ++j) {
        if (gap[j] > 3.0 * gap_se[j] && gap[j] > 1e-12) {
          const double lx = probe_ts[j], ly = std::log(gap[j]);
          sx += lx;
          sy += ly;
          sxx += lx * lx;
          sxy += lx * ly;
          ++m;
        }
      }
      if (m >= 3) {
        const double denom = m * sxx - sx * sx;
        const double fitted = -(m * sxy - sx * sy) / denom;
        slope = std::clamp(fitted, rate_floor, 5.0);
        log_c = (sy + slope * sx) / m;
      } else if (m >= 1) {
        double c = 0.0;
        for (std::size_t j = 0; j < probe_ts.size(); ++j) {
          if (gap[j] > 3.0 * gap_se[j]) c = std::max(c, std::log(gap[j]) + slope * probe_ts[j]);
        }
        log_c = c;
      } else {
        log_c = std::log(1e-8);  // flat at the noise floor: h is semigroup-invariant
      }
    }
    fitted_rate_ = slope;
    fitted_constant_ = std::exp(log_c);
    if (t_max <= 0.0) {
      const double tail_target = 0.1 * budget_.tol * slope;
      t_max = (log_c - std::log(tail_target)) / slope;
      t_max = std::clamp(t_max, 4.0, 120.0);
    }
  }

  // composite Gauss-Legendre panels on [0, t_max], geometric widths
  {
    const QuadratureRule& gl = gauss_legendre(budget_.nodes_per_panel);
    double lo = 0.0, width = 0.4;
    while (lo < t_max) {
      const double hi = std::min(t_max, lo + width);
      for (int q = 0; q < budget_.nodes_per_panel; ++q) {
        ts_.push_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.nodes[q]);
        ws_.push_back(0.5 * (hi - lo) * gl.weights[q]);
      }
      lo = hi;
      width *= 1.4;
    }
  }

  paths_.emplace(law_, ts_, budget_.n_mc, budget_.seed + 303);

  // tail sanity: the integrand at the horizon must sit inside the tolerance
  {
    const double et = std::exp(-ts_.back());
    const Mat& u = paths_->at(ts_.size() - 1);
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < budget_.n_mc; ++i) {
      const double v = h_.value(Vec(u.row(i).transpose() + et * law_.mean));
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / budget_.n_mc;
    const double se =
        std::sqrt(std::max(0.0, sum2 / budget_.n_mc - mean * mean) / budget_.n_mc);
    if (std::abs(mean - e_h_) > std::max(budget_.tol, 5.0 * se + 5.0 * e_h_se_)) {
      throw TailNotConverged("semigroup integrand at t_max exceeds the tolerance");
    }
  }
}

double SteinSolution::value(const Vec& x) const {
  double total = 0.0;
  for (std::size_t j = 0; j < ts_.size(); ++j) {
    const double et = std::exp(-ts_[j]);
    const Mat& u = paths_->at(j);
    double sum = 0.0;
    for (int i = 0; i < u.rows(); ++i) {
      sum += h_.value(Vec(u.row(i).transpose() + et * x));
    }
    total += ws_[j] * (sum / u.rows() - e_h_);
  }
  return -total;
}

Mat SteinSolution::gradient_blocks(const Vec& x) const {
  const int d = law_.dim();
  const int B = budget_.se_blocks;
  Mat acc = Mat::Zero(d, B);
  Vec counts = Vec::Zero(B);
  Mat block_sum(d, B);
  for (std::size_t j = 0; j < ts_.size(); ++j) {
    const double et = std::exp(-ts_[j]);
    const Mat& u = paths_->at(j);
    block_sum.setZero();
    if (j == 0) counts.setZero();
    for (int i = 0; i < u.rows(); ++i) {
      const Vec g = h_.gradient(Vec(u.row(i).transpose() + et * x));
      block_sum.col(i % B) += g;
      if (j == 0) counts[i % B] += 1.0;
    }
    for (int b = 0; b < B; ++b) {
      acc.col(b) -= ws_[j] * et * block_sum.col(b) / counts[b];
    }
  }
  return acc;
}

Vec SteinSolution::gradient(const Vec& x) const {
  const Mat blocks = gradient_blocks(x);
  return blocks.rowwise().mean();
}

Vec SteinSolution::gradient_se(const Vec& x) const {
  const Mat blocks = gradient_blocks(x);
  const int B = budget_.se_blocks;
  const Vec mean = blocks.rowwise().mean();
  Vec var = Vec::Zero(law_.dim());
  for (int b = 0; b < B; ++b) var += (blocks.col(b) - mean).cwiseAbs2();
  return (var / ((B - 1.0) * B)).cwiseSqrt();
}

Mat SteinSolution::hessian_blocks(const Vec& x) const {
  const int d = law_.dim();
  const int B = budget_.se_blocks;
  Mat acc = Mat::Zero(d * d, B);
  Vec counts = Vec::Zero(B);
  Mat block_sum(d * d, B);
  for (std::size_t j = 0; j < ts_.size(); ++j) {
    const double et = std::exp(-ts_[j]);
    const Mat& u = paths_->at(j);
    block_sum.setZero();
    if (j == 0) counts.setZero();
    for (int i = 0; i < u.rows(); ++i) {
      const Mat hess = h_.hessian(Vec(u.row(i).transpose() + et * x));
      block_sum.col(i % B) += Eigen::Map<const Vec>(hess.data(), d * d);
      if (j == 0) counts[i % B] += 1.0;
    }
    for (int b = 0; b < B; ++b) {
      acc.col(b) -= ws_[j] * et * et * block_sum.col(b) / counts[b];
    }
  }
  return acc;
}

Mat SteinSolution::hessian(const Vec& x) const {
  const int d = law_.dim();
  const Mat blocks = hessian_blocks(x);
  const Vec mean = blocks.rowwise().mean();
  return Eigen::Map<const Mat>(mean.data(), d, d);
}

ValueWithError stein_residual(const SDLawSpec& law, const SteinSolution& solution,
                              const Vec& x, const GeneratorOptions& options) {
  const int B = solution.blocks();
  BlockField field;
  field.dim = law.dim();
  field.blocks = B;
  field.m1_bound = std::sqrt(static_cast<double>(law.dim()));
  field.m2_bound = law.dim() / 2.0;
  field.eval = [&](const Vec& y) { return solution.gradient_blocks(y); };

  const JumpResult jump = jump_integral_on_field(law, field, x, options);
  const Mat grad_blocks = solution.gradient_blocks(x);
  const double hx = solution.test_function().value(x);

  Vec residual(B);
  for (int b = 0; b < B; ++b) {
    const double drift = (law.mean - x).dot(grad_blocks.col(b));
    residual[b] =
        drift + jump.per_block[b] - hx + solution.e_h_block_values()[b];
  }
  const double mean = residual.mean();
  const double var = (residual.array() - mean).square().sum() / (B - 1);
  return {mean, std::sqrt(var / B)};
}

CharacterizationEstimate characterization_identity(const SDLawSpec& law,
                                                   const SmoothTestFunction& f,
                                                   int n_samples, std::uint64_t seed,
                                                   const GeneratorOptions& options) {
  if (!f.gradient) throw Error("characterization_identity: gradient required");
  CharacterizationEstimate est;

  // drift side on one batch
  {
    const SampleBatch batch = sample_target(law, n_samples, seed);
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < batch.n(); ++i) {
      const Vec xi = batch.points.row(i).transpose();
      const double v = (xi - law.mean).dot(f.gradient(xi));
      sum += v;
      sum2 += v * v;
    }
    est.drift_side = sum / n_samples;
    est.drift_se = std::sqrt(
        std::max(0.0, sum2 / n_samples - est.drift_side * est.drift_side) / n_samples);
  }

  // jump side on an independent batch
  {
    const SampleBatch batch = sample_target(law, n_samples, seed + 1);
    BlockField field;
    field.dim = law.dim();
    field.blocks = 1;
    field.m1_bound = std::max(f.m1, 1e-12);
    field.m2_bound = std::max(f.m2, 1e-12);
    field.eval = [&](const Vec& y) { return Mat(f.gradient(y)); };
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < batch.n(); ++i) {
      const Vec xi = batch.points.row(i).transpose();
      const double v = jump_integral_on_field(law, field, xi, options).per_block[0];
      sum += v;
      sum2 += v * v;
    }
    est.jump_side = sum / n_samples;
    est.jump_se = std::sqrt(
        std::max(0.0, sum2 / n_samples - est.jump_side * est.jump_side) / n_samples);
  }
  return est;
}

}  // namespace sdstein
