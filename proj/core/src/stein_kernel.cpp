#include "sdstein/stein_kernel.hpp"

#include <cmath>

#include "sdstein/errors.hpp"

namespace sdstein {

SteinKernelFn SteinKernelFn::from_field(VectorField field) {
  SteinKernelFn k;
  k.name_ = field.name;
  k.basis_.push_back(std::move(field));
  k.coeffs_ = Vec::Ones(1);
  return k;
}

SteinKernelFn::SteinKernelFn(std::vector<VectorField> basis, Vec coeffs, Vec offset)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)), offset_(std::move(offset)) {
  if (static_cast<int>(basis_.size()) != coeffs_.size()) {
    throw Error("SteinKernelFn: coefficient/basis size mismatch");
  }
  name_ = "galerkin_kernel";
}

Vec SteinKernelFn::operator()(const Vec& y) const {
  Vec out = offset_.size() > 0 ? Vec(-offset_) : Vec(Vec::Zero(y.size()));
  for (std::size_t j = 0; j < basis_.size(); ++j) {
    const double c = coeffs_[static_cast<int>(j)];
    if (c != 0.0) out += c * basis_[j].eval(y);
  }
  return out;
}

SteinKernelFn identity_kernel(int dim) {
  VectorField f;
  f.eval = [](const Vec& y) { return y; };
  f.name = "identity";
  return SteinKernelFn::from_field(std::move(f));
}

NuSecondMomentSampler::NuSecondMomentSampler(const PolarLevyMeasure& nu) : nu_(&nu) {
  double total = 0.0;
  if (nu.is_rotationally_invariant()) {
    total = nu.profile(0).second_moment(0.0, kInf);
    if (!std::isfinite(total)) {
      throw InfiniteSecondMomentNu("Levy measure has infinite second moment");
    }
    atom_probs_ = {1.0};
  } else {
    for (std::size_t a = 0; a < nu.atom_count(); ++a) {
      const double piece =
          nu.atom(a).weight * nu.profile(a).second_moment(0.0, kInf);
      if (!std::isfinite(piece)) {
        throw InfiniteSecondMomentNu("Levy measure has infinite second moment");
      }
      total += piece;
      atom_probs_.push_back(total);
    }
    for (double& p : atom_probs_) p /= total;
  }
  m2_ = total;
}

Vec NuSecondMomentSampler::draw(RngStream& rng) const {
  std::size_t atom = 0;
  if (!nu_->is_rotationally_invariant() && atom_probs_.size() > 1) {
    const double u = rng.uniform();
    while (atom + 1 < atom_probs_.size() && u > atom_probs_[atom]) ++atom;
  }
  const RadialProfile& profile = nu_->profile(atom);
  // radius from the density r k(r) / int r k, inverted via the closed-form
  // second moment (gamma profiles get the exact Gamma(2, beta) shortcut)
  double r;
  if (profile.kind() == RadialProfile::Kind::Exponential) {
    r = (rng.exponential() + rng.exponential()) / profile.beta();
  } else {
    const double total = profile.second_moment(0.0, kInf);
    const double target = rng.uniform() * total;
    double lo = 0.0, hi = 1.0;
    while (profile.second_moment(0.0, hi) < target && hi < 1e12) hi *= 2.0;
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      (profile.second_moment(0.0, mid) < target ? lo : hi) = mid;
    }
    r = 0.5 * (lo + hi);
  }
  const Vec dir = nu_->is_rotationally_invariant()
                      ? rng.uniform_direction(nu_->dim())
                      : nu_->atom(atom).direction;
  return r * dir;
}

namespace {

// Common loop: average integrand(y, u, ||u||^2) with y cycling through the
// sample rows and u drawn from the second-moment-tilted measure.
ValueWithError nu_monte_carlo(const SDLawSpec& law, const SampleBatch& samples,
                              const NuEstimateBudget& budget,
                              const std::function<double(const Vec&, const Vec&)>& term) {
  NuSecondMomentSampler sampler(law.levy);
  const int n = budget.n;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    RngStream rng(budget.seed, "nu_mc", static_cast<std::uint64_t>(i));
    const Vec u = sampler.draw(rng);
    const Vec y = samples.points.row(i % samples.n()).transpose();
    const double v = sampler.m2() * term(y, u) / u.squaredNorm();
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  const double var = std::max(0.0, sum2 / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

ValueWithError sqrt_with_se(const ValueWithError& squared) {
  const double value = std::sqrt(std::max(0.0, squared.value));
  const double se = value > 1e-12 ? squared.se / (2.0 * value) : std::sqrt(squared.se);
  return {value, se};
}

}  // namespace

ValueWithError discrepancy(const SDLawSpec& law_X, const SampleBatch& samples_Y,
                           const SteinKernelFn& tau, const NuEstimateBudget& budget) {
  const ValueWithError s2 = nu_monte_carlo(
      law_X, samples_Y, budget, [&](const Vec& y, const Vec& u) {
        return (tau(y + u) - tau(y) - u).squaredNorm();
      });
  return sqrt_with_se(s2);
}

ValueWithError kernel_energy(const SDLawSpec& law_X, const SampleBatch& samples_Y,
                             const SteinKernelFn& tau, const NuEstimateBudget& budget) {
  return nu_monte_carlo(law_X, samples_Y, budget, [&](const Vec& y, const Vec& u) {
    return (tau(y + u) - tau(y)).squaredNorm();
  });
}

ValueWithError kernel_load(const SampleBatch& samples_Y, const SteinKernelFn& tau) {
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < samples_Y.n(); ++i) {
    const Vec y = samples_Y.points.row(i).transpose();
    const double v = y.dot(tau(y));
    sum += v;
    sum2 += v * v;
  }
  const double n = samples_Y.n();
  const double mean = sum / n;
  const double var = std::max(0.0, sum2 / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

std::pair<SteinKernelFn, GalerkinSystem> galerkin_solve(
    const SDLawSpec& law_X, const SampleBatch& samples_Y,
    const std::vector<VectorField>& basis, const GalerkinOptions& options) {
  const int m = static_cast<int>(basis.size());
  const int d = law_X.dim();
  NuSecondMomentSampler sampler(law_X.levy);

  // Gram matrix from shared (y, u) draws: A += D^t D / ||u||^2 with
  // D = [f_j(y+u) - f_j(y)]_j, hence symmetric PSD by construction.
  Mat a_hat = Mat::Zero(m, m);
  Mat diffs(d, m);
  for (int i = 0; i < options.n_nu; ++i) {
    RngStream rng(options.seed, "gram", static_cast<std::uint64_t>(i));
    const Vec u = sampler.draw(rng);
    const Vec y = samples_Y.points.row(i % samples_Y.n()).transpose();
    const Vec yu = y + u;
    for (int j = 0; j < m; ++j) diffs.col(j) = basis[j].eval(yu) - basis[j].eval(y);
    a_hat.selfadjointView<Eigen::Lower>().rankUpdate(diffs.transpose(),
                                                     1.0 / u.squaredNorm());
  }
  a_hat = Mat(a_hat.selfadjointView<Eigen::Lower>());
  a_hat *= sampler.m2() / options.n_nu;

  // load vector over the full (centered) cloud, with the basis means removed
  Mat mean_fields = Mat::Zero(d, m);
  for (int i = 0; i < samples_Y.n(); ++i) {
    const Vec y = samples_Y.points.row(i).transpose();
    for (int j = 0; j < m; ++j) mean_fields.col(j) += basis[j].eval(y);
  }
  mean_fields /= samples_Y.n();
  Vec l_hat = Vec::Zero(m);
  for (int i = 0; i < samples_Y.n(); ++i) {
    const Vec y = samples_Y.points.row(i).transpose();
    for (int j = 0; j < m; ++j) {
      l_hat[j] += y.dot(basis[j].eval(y) - mean_fields.col(j));
    }
  }
  l_hat /= samples_Y.n();

  // constants have exactly zero A-energy (the form only sees increments);
  // they are fixed at zero, which is the H_{nu,0} quotient representative
  const double diag_max = a_hat.diagonal().maxCoeff();
  std::vector<int> active;
  for (int j = 0; j < m; ++j) {
    if (a_hat(j, j) > 1e-14 * diag_max) active.push_back(j);
  }
  const int ma = static_cast<int>(active.size());
  Mat a_act(ma, ma);
  Vec l_act(ma);
  for (int r = 0; r < ma; ++r) {
    l_act[r] = l_hat[active[r]];
    for (int c = 0; c < ma; ++c) a_act(r, c) = a_hat(active[r], active[c]);
  }

  const double ridge = options.ridge_factor * a_act.trace() / std::max(1, ma);
  Mat regularised = a_act + ridge * Mat::Identity(ma, ma);
  {
    Eigen::SelfAdjointEigenSolver<Mat> es(regularised);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo <= 0.0 || hi / lo > options.condition_limit) {
      throw SingularSystem("Galerkin system remains ill-conditioned after ridge");
    }
  }
  const Vec c_act = regularised.ldlt().solve(l_act);

  Vec coeffs = Vec::Zero(m);
  for (int r = 0; r < ma; ++r) coeffs[active[r]] = c_act[r];

  // remove the empirical mean so the kernel sits in the centered space
  Vec offset = Vec::Zero(d);
  for (int j = 0; j < m; ++j) offset += coeffs[j] * mean_fields.col(j);

  GalerkinSystem system;
  system.a_hat = a_hat;
  system.l_hat = l_hat;
  system.coeffs = coeffs;
  system.ridge = ridge;
  {
    Eigen::SelfAdjointEigenSolver<Mat> es(regularised);
    system.condition = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
  }
  for (const auto& f : basis) system.basis_names.push_back(f.name);

  return {SteinKernelFn(basis, coeffs, offset), std::move(system)};
}

nlohmann::json GalerkinSystem::to_json() const {
  nlohmann::json j;
  j["basis"] = basis_names;
  const int m = static_cast<int>(l_hat.size());
  std::vector<std::vector<double>> a(m, std::vector<double>(m));
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) a[r][c] = a_hat(r, c);
  }
  j["A"] = a;
  j["L"] = std::vector<double>(l_hat.data(), l_hat.data() + m);
  j["coefficients"] = std::vector<double>(coeffs.data(), coeffs.data() + m);
  j["ridge"] = ridge;
  j["condition_estimate"] = condition;
  return j;
}

std::vector<VectorField> default_vector_basis(int dim, int radial_bumps, double scale) {
  std::vector<VectorField> basis;
  for (int i = 0; i < dim; ++i) {
    VectorField f;
    f.eval = [i, dim](const Vec&) {
      Vec e = Vec::Zero(dim);
      e[i] = 1.0;
      return e;
    };
    f.name = "const_e" + std::to_string(i);
    basis.push_back(std::move(f));
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      VectorField f;
      f.eval = [i, j, dim](const Vec& y) {
        Vec e = Vec::Zero(dim);
        e[i] = y[j];
        return e;
      };
      f.name = "lin_y" + std::to_string(j) + "_e" + std::to_string(i);
      basis.push_back(std::move(f));
    }
  }
  for (int k = 0; k < radial_bumps; ++k) {
    const double width = scale * std::pow(2.0, k);
    for (int i = 0; i < dim; ++i) {
      VectorField f;
      f.eval = [i, dim, width](const Vec& y) {
        Vec e = Vec::Zero(dim);
        e[i] = std::exp(-0.5 * y.squaredNorm() / (width * width));
        return e;
      };
      f.name = "bump" + std::to_string(k) + "_e" + std::to_string(i);
      basis.push_back(std::move(f));
    }
  }
  return basis;
}

PoincareResult poincare_ratio(const SampleBatch& samples_Y, const PolarLevyMeasure& nu,
                              const std::vector<const SmoothTestFunction*>& dictionary,
                              const PoincareBudget& budget) {
  NuSecondMomentSampler sampler(nu);
  const int d = samples_Y.dim();
  const int B = budget.blocks;

  // scalar probes: coordinates first, then the dictionary entries
  struct Probe {
    std::string name;
    std::function<double(const Vec&)> eval;
  };
  std::vector<Probe> probes;
  for (int j = 0; j < d; ++j) {
    probes.push_back({"coordinate_" + std::to_string(j),
                      [j](const Vec& y) { return y[j]; }});
  }
  for (const auto* f : dictionary) {
    probes.push_back({f->name, f->value});
  }
  const int p = static_cast<int>(probes.size());

  // numerator blocks: Var f(Y) over the sample cloud
  Mat num_sum = Mat::Zero(p, B), num_sq = Mat::Zero(p, B);
  Vec num_count = Vec::Zero(B);
  for (int i = 0; i < samples_Y.n(); ++i) {
    const Vec y = samples_Y.points.row(i).transpose();
    const int b = i % B;
    num_count[b] += 1.0;
    for (int q = 0; q < p; ++q) {
      const double v = probes[q].eval(y);
      num_sum(q, b) += v;
      num_sq(q, b) += v * v;
    }
  }

  // denominator blocks: m2 E (f(y+u)-f(y))^2 / ||u||^2
  Mat den_sum = Mat::Zero(p, B);
  Vec den_count = Vec::Zero(B);
  for (int i = 0; i < budget.n_nu; ++i) {
    RngStream rng(budget.seed, "poincare", static_cast<std::uint64_t>(i));
    const Vec u = sampler.draw(rng);
    const Vec y = samples_Y.points.row(i % samples_Y.n()).transpose();
    const Vec yu = y + u;
    const int b = i % B;
    den_count[b] += 1.0;
    const double u2 = u.squaredNorm();
    for (int q = 0; q < p; ++q) {
      const double diff = probes[q].eval(yu) - probes[q].eval(y);
      den_sum(q, b) += diff * diff / u2;
    }
  }

  PoincareResult result;
  for (int q = 0; q < p; ++q) {
    double num_total = 0.0, num_sq_total = 0.0, count = 0.0;
    for (int b = 0; b < B; ++b) {
      num_total += num_sum(q, b);
      num_sq_total += num_sq(q, b);
      count += num_count[b];
    }
    const double mean = num_total / count;
    const double numerator = std::max(0.0, num_sq_total / count - mean * mean);
    const double denominator =
        sampler.m2() * den_sum.row(q).sum() / den_count.sum();

    // block-resolved ratios for the jackknife SE
    Vec ratios(B);
    bool degenerate = denominator <= 0.0;
    for (int b = 0; b < B; ++b) {
      const double nm = num_sum(q, b) / num_count[b];
      const double nv = std::max(0.0, num_sq(q, b) / num_count[b] - nm * nm);
      const double dv = sampler.m2() * den_sum(q, b) / den_count[b];
      if (dv <= 0.0) {
        degenerate = true;
        break;
      }
      ratios[b] = nv / dv;
    }
    if (degenerate) {
      throw DegenerateDenominator("Poincare probe '" + probes[q].name +
                                  "' has a vanishing Dirichlet form");
    }
    const double ratio = numerator / denominator;
    const double rmean = ratios.mean();
    const double var = (ratios.array() - rmean).square().sum() / (B - 1);
    PoincareDetail detail{probes[q].name, ratio, numerator, denominator,
                          std::sqrt(var / B)};
    if (detail.ratio > result.u_hat) {
      result.u_hat = detail.ratio;
      result.argmax = q;
    }
    result.detail.push_back(std::move(detail));
  }
  return result;
}

namespace {

double mean_squared_norm(const SampleBatch& samples) {
  double s = 0.0;
  for (int i = 0; i < samples.n(); ++i) s += samples.points.row(i).squaredNorm();
  return s / samples.n();
}

}  // namespace

double bound_from_poincare(const SDLawSpec& law_X, const SampleBatch& samples_Y,
                           double u_hat, PoincareBoundMode mode,
                           double moment_match_tol) {
  const double m2 = levy_moment(law_X, LevyMoment::M2Total);
  if (!std::isfinite(m2)) {
    throw InfiniteSecondMomentNu("Poincare bounds need a finite second moment");
  }
  const double ey2 = mean_squared_norm(samples_Y);
  const double d = law_X.dim();
  if (mode == PoincareBoundMode::Matched) {
    if (u_hat < 1.0 - 1e-9) throw MomentMismatch("matched mode requires U >= 1");
    if (std::abs(ey2 - m2) > moment_match_tol * m2) {
      throw MomentMismatch("matched mode requires E||Y||^2 = m2 within tolerance");
    }
    return 0.5 * d * m2 * std::sqrt(std::max(0.0, u_hat - 1.0));
  }
  return 0.5 * d * std::sqrt(m2) *
         std::sqrt(std::max(0.0, u_hat * ey2 + m2 - 2.0 * ey2));
}

double discrepancy_bound_from_poincare(const SDLawSpec& law_X,
                                       const SampleBatch& samples_Y, double u_hat) {
  const double m2 = levy_moment(law_X, LevyMoment::M2Total);
  const double ey2 = mean_squared_norm(samples_Y);
  return std::sqrt(std::max(0.0, u_hat * ey2 + m2 - 2.0 * ey2));
}

}  // namespace sdstein
