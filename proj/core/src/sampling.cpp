#include "sdstein/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sdstein/catalog.hpp"
#include "sdstein/charfn.hpp"
#include "sdstein/errors.hpp"
#include "sdstein/rng.hpp"

namespace sdstein {

namespace {

// Inverse-CDF sampler for the normalised jump-radius law k(r)/r on (eps, end).
// A cumulative-mass grid is built once from the exact antiderivatives; a draw
// is a binary search in that grid plus an exact (power / step) or Newton
// (smooth) inversion inside the located cell.
class RadialJumpSampler {
 public:
  RadialJumpSampler(const RadialProfile& profile, double eps)
      : profile_(profile), eps_(eps) {
    if (eps <= 0.0 && profile.mass_diverges_at_zero()) {
      throw InfiniteIntensity("jump intensity diverges without truncation");
    }
    end_ = profile.support_end();
    total_ = profile.mass(eps_, end_);
    if (!std::isfinite(total_)) {
      throw InfiniteIntensity("jump intensity beyond the truncation radius is infinite");
    }
    if (profile_.kind() == RadialProfile::Kind::Power || total_ <= 0.0) return;

    // log-spaced grid covering all but 1e-14 of the mass
    double hi = end_;
    if (!std::isfinite(hi)) {
      hi = std::max(1.0, 2.0 * eps_);
      while (profile_.mass(hi, kInf) > 1e-14 * total_) hi *= 2.0;
    }
    const int cells = 512;
    grid_r_.resize(cells + 1);
    grid_m_.resize(cells + 1);
    for (int i = 0; i <= cells; ++i) {
      grid_r_[i] = eps_ * std::pow(hi / eps_, static_cast<double>(i) / cells);
      grid_m_[i] = profile_.mass(eps_, grid_r_[i]);
    }
    grid_m_.back() = total_;
  }

  double total_mass() const { return total_; }

  double draw(RngStream& rng) const {
    const double target = rng.uniform() * total_;
    if (profile_.kind() == RadialProfile::Kind::Power) {
      // mass(eps, r) = (c/alpha)(eps^-alpha - r^-alpha): exact inversion
      const double c = profile_.coeff(), a = profile_.alpha();
      return std::pow(std::pow(eps_, -a) - a * target / c, -1.0 / a);
    }
    const auto it = std::upper_bound(grid_m_.begin(), grid_m_.end(), target);
    const std::size_t cell =
        std::min(grid_m_.size() - 2,
                 static_cast<std::size_t>(std::max<std::ptrdiff_t>(
                     0, it - grid_m_.begin() - 1)));
    double lo = grid_r_[cell], hi = grid_r_[cell + 1];
    const double want = target - grid_m_[cell];  // mass beyond the cell edge
    // Newton from the midpoint with bisection safeguarding
    double r = std::sqrt(lo * hi);
    for (int iter = 0; iter < 40; ++iter) {
      const double err = profile_.mass(grid_r_[cell], r) - want;
      (err < 0.0 ? lo : hi) = r;
      const double density = profile_(r) / r;
      double next = density > 0.0 ? r - err / density : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - r) < 1e-12 * r) return next;
      r = next;
    }
    return r;
  }

 private:
  const RadialProfile& profile_;
  double eps_;
  double end_;
  double total_;
  std::vector<double> grid_r_;
  std::vector<double> grid_m_;
};

bool is_stable_family(const SDLawSpec& law) {
  return law.family == Family::RotInvStable || law.family == Family::SymmetricStable;
}

bool is_gamma_family(const SDLawSpec& law) {
  return law.family == Family::MultiGamma || law.family == Family::ExpProfile;
}

// Antipodal pair representatives (index, partner, pair weight) of a discrete
// symmetric-stable lambda.
struct AtomPair {
  Vec direction;
  double pair_weight;
};

std::vector<AtomPair> antipodal_pairs(const PolarLevyMeasure& levy) {
  std::vector<AtomPair> pairs;
  std::vector<bool> used(levy.atom_count(), false);
  for (std::size_t i = 0; i < levy.atom_count(); ++i) {
    if (used[i]) continue;
    for (std::size_t j = i + 1; j < levy.atom_count(); ++j) {
      if (used[j]) continue;
      if ((levy.atom(i).direction + levy.atom(j).direction).norm() < 1e-9) {
        pairs.push_back({levy.atom(i).direction,
                         levy.atom(i).weight + levy.atom(j).weight});
        used[i] = used[j] = true;
        break;
      }
    }
    if (!used[i]) throw UnsupportedLaw("symmetric stable sampling needs antipodal pairs");
  }
  return pairs;
}

// Centered draw from a stable catalog law (mean removed).
Vec centered_stable_draw(const SDLawSpec& law, RngStream& rng) {
  const double alpha = law.stable_alpha;
  if (law.family == Family::RotInvStable) {
    // X = C^{1/alpha} sqrt(2 S) G with S positive (alpha/2)-stable
    const double s = rng.positive_stable(alpha / 2.0);
    const Vec g = rng.normal_vec(law.dim());
    return std::pow(law.stable_scale, 1.0 / alpha) * std::sqrt(2.0 * s) * g;
  }
  // discrete lambda: independent 1-d symmetric stable draws along pair axes
  const double sigma = catalog::stable_sigma(alpha);
  Vec x = Vec::Zero(law.dim());
  for (const auto& pair : antipodal_pairs(law.levy)) {
    const double coeff = law.levy.profile_at(pair.direction).coeff();
    const double scale = std::pow(pair.pair_weight * coeff * sigma, 1.0 / alpha);
    x += scale * rng.symmetric_stable(alpha) * pair.direction;
  }
  return x;
}

// Gamma-family target draw: mean + sum_a x_a (G_a - theta_a / beta_a).
Vec gamma_family_draw(const SDLawSpec& law, RngStream& rng) {
  Vec x = law.mean;
  for (std::size_t a = 0; a < law.levy.atom_count(); ++a) {
    const double theta = law.gamma_shape[static_cast<int>(a)];
    const double beta = law.gamma_rate[static_cast<int>(a)];
    const double g = rng.gamma(theta) / beta;
    x += (g - theta / beta) * law.levy.atom(a).direction;
  }
  return x;
}

double auto_epsilon(const SDLawSpec& law) {
  // eps with sqrt(int_{r<=eps} r^2 nu(dr)) <= 1e-3 sqrt(m2_small)
  double m2_small = 0.0;
  for (const auto& node : law.levy.direction_nodes()) {
    m2_small += node.weight * node.profile->second_moment(0.0, 1.0);
  }
  const double target = 1e-6 * m2_small;
  double eps = 1.0;
  for (int i = 0; i < 200; ++i) {
    double removed = 0.0;
    for (const auto& node : law.levy.direction_nodes()) {
      removed += node.weight * node.profile->second_moment(0.0, eps);
    }
    if (removed <= target) return eps;
    eps *= 0.5;
  }
  return eps;
}

}  // namespace

SampleBatch sample_target(const SDLawSpec& law, int n, std::uint64_t seed) {
  if (n < 1) throw Error("sample_target: n must be >= 1");
  SampleBatch batch;
  batch.law_id = law.id;
  batch.seed = seed;
  batch.points.resize(n, law.dim());

  if (is_gamma_family(law)) {
    for (int i = 0; i < n; ++i) {
      RngStream rng(seed, "target", static_cast<std::uint64_t>(i));
      batch.points.row(i) = gamma_family_draw(law, rng).transpose();
    }
    return batch;
  }
  if (is_stable_family(law)) {
    for (int i = 0; i < n; ++i) {
      RngStream rng(seed, "target", static_cast<std::uint64_t>(i));
      batch.points.row(i) = (law.mean + centered_stable_draw(law, rng)).transpose();
    }
    return batch;
  }

  // generic route: compound Poisson beyond eps plus the first-moment shift
  const double eps = auto_epsilon(law);
  SampleBatch cp = compound_poisson_approx(law.levy, eps, n, seed);
  const Vec shift = law.mean - levy_mean_large(law);
  cp.points.rowwise() += shift.transpose();
  cp.law_id = law.id;
  return cp;
}

SampleBatch compound_poisson_approx(const PolarLevyMeasure& nu, double eps, int n,
                                    std::uint64_t seed) {
  if (n < 1) throw Error("compound_poisson_approx: n must be >= 1");
  const int dim = nu.dim();
  SampleBatch batch;
  batch.law_id = "compound_poisson";
  batch.seed = seed;
  batch.epsilon = eps;
  batch.points = Mat::Zero(n, dim);

  const auto nodes = nu.direction_nodes();
  double removed_l2 = 0.0;

  if (nu.is_rotationally_invariant()) {
    const RadialProfile& profile = nu.profile(0);
    RadialJumpSampler sampler(profile, eps);
    const double intensity = sampler.total_mass();  // spherical mass is 1
    removed_l2 = profile.second_moment(0.0, eps);
    // isotropic jumps have zero compensator by symmetry
    for (int i = 0; i < n; ++i) {
      RngStream rng(seed, "cp", static_cast<std::uint64_t>(i));
      const long long jumps = rng.poisson(intensity);
      Vec x = Vec::Zero(dim);
      for (long long j = 0; j < jumps; ++j) {
        x += sampler.draw(rng) * rng.uniform_direction(dim);
      }
      batch.points.row(i) = x.transpose();
    }
  } else {
    for (std::size_t a = 0; a < nodes.size(); ++a) {
      const auto& node = nodes[a];
      RadialJumpSampler sampler(*node.profile, eps);
      const double intensity = node.weight * sampler.total_mass();
      removed_l2 += node.weight * node.profile->second_moment(0.0, eps);
      const Vec compensator =
          eps < 1.0 ? Vec(node.weight * node.profile->first_moment(eps, 1.0) *
                          node.direction)
                    : Vec(Vec::Zero(dim));
      const std::string purpose = "cp#" + std::to_string(a);
      for (int i = 0; i < n; ++i) {
        RngStream rng(seed, purpose, static_cast<std::uint64_t>(i));
        const long long jumps = rng.poisson(intensity);
        double radius_sum = 0.0;
        for (long long j = 0; j < jumps; ++j) radius_sum += sampler.draw(rng);
        batch.points.row(i) +=
            (radius_sum * node.direction - compensator).transpose();
      }
    }
  }
  batch.truncation_l2_error = std::sqrt(removed_l2);
  return batch;
}

namespace {

// mu_t sampling via thinning of the eps-truncated dominating intensity
// k(r)/r: a jump at radius r survives with probability 1 - k(e^t r)/k(r).
void mu_t_generic(const SDLawSpec& law, double t, int n, std::uint64_t seed, double eps,
                  Mat& out, double& removed_l2) {
  const int dim = law.dim();
  const auto nodes = law.levy.direction_nodes();
  out = Mat::Zero(n, dim);
  removed_l2 = 0.0;
  const double et = std::exp(t);

  auto survive = [&](const RadialProfile& k, double r, double u) {
    const double kr = k(r);
    if (kr <= 0.0) return false;
    const double ratio = r * et >= k.support_end() ? 0.0 : k(r * et) / kr;
    return u < 1.0 - ratio;
  };

  const bool isotropic = law.levy.is_rotationally_invariant();
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    const auto& node = nodes[a];
    const RadialProfile& profile = *node.profile;
    RadialJumpSampler sampler(profile, eps);
    const double weight = isotropic ? 1.0 : node.weight;
    removed_l2 += weight * (profile.second_moment(0.0, eps) -
                            std::exp(-2.0 * t) *
                                profile.second_moment(0.0, eps * et));
    // compensator of the accepted jumps: int_eps^inf (k(r) - k(e^t r)) dr
    const double fm_diff = profile.first_moment(eps, kInf) -
                           std::exp(-t) * profile.first_moment(eps * et, kInf);
    const double intensity = isotropic ? sampler.total_mass()
                                       : node.weight * sampler.total_mass();
    const std::string purpose = "mu_t#" + std::to_string(a);
    for (int i = 0; i < n; ++i) {
      RngStream rng(seed, purpose, static_cast<std::uint64_t>(i));
      const long long jumps = rng.poisson(intensity);
      Vec x = Vec::Zero(dim);
      for (long long j = 0; j < jumps; ++j) {
        const double r = sampler.draw(rng);
        const double u = rng.uniform();
        if (isotropic) {
          const Vec dir = rng.uniform_direction(dim);
          if (survive(profile, r, u)) x += r * dir;
        } else if (survive(profile, r, u)) {
          x += r * node.direction;
        }
      }
      if (!isotropic) x -= node.weight * fm_diff * node.direction;
      out.row(i) += x.transpose();
    }
    if (isotropic) break;  // single shared profile, directions already uniform
  }
  for (int i = 0; i < n; ++i) {
    out.row(i) += ((1.0 - std::exp(-t)) * law.mean).transpose();
  }
}

}  // namespace

SampleBatch sample_mu_t(const SDLawSpec& law, double t, int n, std::uint64_t seed,
                        const MuTOptions& options) {
  if (t < 0.0) throw Error("sample_mu_t: t must be nonnegative");
  if (n < 1) throw Error("sample_mu_t: n must be >= 1");
  SampleBatch batch;
  batch.law_id = law.id;
  batch.t = t;
  batch.seed = seed;
  batch.points = Mat::Zero(n, law.dim());
  if (t == 0.0) return batch;  // mu_0 = delta_0

  if (is_stable_family(law)) {
    const double scale = std::pow(1.0 - std::exp(-law.stable_alpha * t),
                                  1.0 / law.stable_alpha);
    const Vec drift = (1.0 - std::exp(-t)) * law.mean;
    for (int i = 0; i < n; ++i) {
      RngStream rng(seed, "mu_t", static_cast<std::uint64_t>(i));
      batch.points.row(i) = (drift + scale * centered_stable_draw(law, rng)).transpose();
    }
    return batch;
  }

  if (is_gamma_family(law)) {
    // Poisson(theta t) arrivals, jump (E/beta) e^{-t U}; exact, eps = 0
    Vec drift = (1.0 - std::exp(-t)) * law.mean;
    for (std::size_t a = 0; a < law.levy.atom_count(); ++a) {
      const double theta = law.gamma_shape[static_cast<int>(a)];
      const double beta = law.gamma_rate[static_cast<int>(a)];
      drift -= theta * (1.0 - std::exp(-t)) / beta * law.levy.atom(a).direction;
    }
    for (int i = 0; i < n; ++i) {
      batch.points.row(i) = drift.transpose();
    }
    for (std::size_t a = 0; a < law.levy.atom_count(); ++a) {
      const double theta = law.gamma_shape[static_cast<int>(a)];
      const double beta = law.gamma_rate[static_cast<int>(a)];
      const Vec& dir = law.levy.atom(a).direction;
      const std::string purpose = "mu_t#" + std::to_string(a);
      for (int i = 0; i < n; ++i) {
        RngStream rng(seed, purpose, static_cast<std::uint64_t>(i));
        const long long jumps = rng.poisson(theta * t);
        double sum = 0.0;
        for (long long j = 0; j < jumps; ++j) {
          sum += rng.exponential() * std::exp(-t * rng.uniform()) / beta;
        }
        batch.points.row(i) += (sum * dir).transpose();
      }
    }
    return batch;
  }

  const double eps = options.epsilon >= 0.0 ? options.epsilon : auto_epsilon(law);
  batch.epsilon = eps;
  double removed = 0.0;
  mu_t_generic(law, t, n, seed, eps, batch.points, removed);
  batch.truncation_l2_error = std::sqrt(std::max(0.0, removed));
  if (options.error_budget && batch.truncation_l2_error > *options.error_budget) {
    throw TruncationBudgetExceeded("mu_t truncation error exceeds the caller budget");
  }
  return batch;
}

InnovationPaths::InnovationPaths(const SDLawSpec& law, std::vector<double> ts, int n,
                                 std::uint64_t seed, double eps)
    : ts_(std::move(ts)), n_(n) {
  if (!std::is_sorted(ts_.begin(), ts_.end())) {
    throw Error("InnovationPaths: t grid must be increasing");
  }
  const int dim = law.dim();
  const std::size_t m = ts_.size();
  values_.assign(m, Mat::Zero(n, dim));
  errors_.assign(m, 0.0);

  if (is_stable_family(law)) {
    for (int i = 0; i < n; ++i) {
      RngStream rng(seed, "paths", static_cast<std::uint64_t>(i));
      const Vec draw = centered_stable_draw(law, rng);
      for (std::size_t j = 0; j < m; ++j) {
        const double t = ts_[j];
        const double scale =
            std::pow(1.0 - std::exp(-law.stable_alpha * t), 1.0 / law.stable_alpha);
        values_[j].row(i) = ((1.0 - std::exp(-t)) * law.mean + scale * draw).transpose();
      }
    }
    return;
  }

  if (is_gamma_family(law)) {
    const double t_max = ts_.back();
    for (std::size_t j = 0; j < m; ++j) {
      Vec drift = (1.0 - std::exp(-ts_[j])) * law.mean;
      for (std::size_t a = 0; a < law.levy.atom_count(); ++a) {
        const double theta = law.gamma_shape[static_cast<int>(a)];
        const double beta = law.gamma_rate[static_cast<int>(a)];
        drift -= theta * (1.0 - std::exp(-ts_[j])) / beta * law.levy.atom(a).direction;
      }
      values_[j].rowwise() = drift.transpose();
    }
    for (std::size_t a = 0; a < law.levy.atom_count(); ++a) {
      const double theta = law.gamma_shape[static_cast<int>(a)];
      const double beta = law.gamma_rate[static_cast<int>(a)];
      const Vec& dir = law.levy.atom(a).direction;
      const std::string purpose = "paths#" + std::to_string(a);
      for (int i = 0; i < n; ++i) {
        RngStream rng(seed, purpose, static_cast<std::uint64_t>(i));
        // rate-theta arrivals tau on (0, t_max], mark (E/beta) e^{-tau}
        double tau = rng.exponential() / theta;
        while (tau <= t_max) {
          const double mark = rng.exponential() * std::exp(-tau) / beta;
          for (std::size_t j = 0; j < m; ++j) {
            if (ts_[j] >= tau) values_[j].row(i) += (mark * dir).transpose();
          }
          tau += rng.exponential() / theta;
        }
      }
    }
    return;
  }

  // generic thinning: one dominating jump set per sample, nested acceptance
  const double eps_used = eps >= 0.0 ? eps : auto_epsilon(law);
  const auto nodes = law.levy.direction_nodes();
  const bool isotropic = law.levy.is_rotationally_invariant();
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    const auto& node = nodes[a];
    const RadialProfile& profile = *node.profile;
    RadialJumpSampler sampler(profile, eps_used);
    const double intensity =
        isotropic ? sampler.total_mass() : node.weight * sampler.total_mass();
    const std::string purpose = "paths#" + std::to_string(a);
    for (int i = 0; i < n; ++i) {
      RngStream rng(seed, purpose, static_cast<std::uint64_t>(i));
      const long long jumps = rng.poisson(intensity);
      for (long long jj = 0; jj < jumps; ++jj) {
        const double r = sampler.draw(rng);
        const double u = rng.uniform();
        const Vec dir = isotropic ? rng.uniform_direction(law.dim()) : node.direction;
        const double kr = profile(r);
        for (std::size_t j = 0; j < m; ++j) {
          const double scaled = r * std::exp(ts_[j]);
          const double ratio =
              scaled >= profile.support_end() ? 0.0 : profile(scaled) / kr;
          if (u < 1.0 - ratio) values_[j].row(i) += (r * dir).transpose();
        }
      }
    }
    if (isotropic) break;
  }
  for (std::size_t j = 0; j < m; ++j) {
    const double t = ts_[j];
    Vec drift = (1.0 - std::exp(-t)) * law.mean;
    double removed = 0.0;
    for (const auto& node : nodes) {
      const RadialProfile& profile = *node.profile;
      const double weight = isotropic ? 1.0 : node.weight;
      if (!isotropic) {
        const double fm_diff =
            profile.first_moment(eps_used, kInf) -
            std::exp(-t) * profile.first_moment(eps_used * std::exp(t), kInf);
        drift -= node.weight * fm_diff * node.direction;
      }
      removed += weight *
                 (profile.second_moment(0.0, eps_used) -
                  std::exp(-2.0 * t) * profile.second_moment(0.0, eps_used * std::exp(t)));
      if (isotropic) break;
    }
    values_[j].rowwise() += drift.transpose();
    errors_[j] = std::sqrt(std::max(0.0, removed));
  }
}

void write_batch_csv(const SampleBatch& batch, const std::string& base_path) {
  std::ofstream csv(base_path + ".csv");
  if (!csv) throw Error("write_batch_csv: cannot open " + base_path + ".csv");
  csv.precision(17);
  for (int a = 0; a < batch.dim(); ++a) csv << (a ? "," : "") << "x" << (a + 1);
  csv << "\n";
  for (int i = 0; i < batch.n(); ++i) {
    for (int a = 0; a < batch.dim(); ++a) csv << (a ? "," : "") << batch.points(i, a);
    csv << "\n";
  }
  nlohmann::json side;
  side["law_id"] = batch.law_id;
  if (batch.t) side["t"] = *batch.t;
  side["seed"] = batch.seed;
  side["epsilon"] = batch.epsilon;
  side["truncation_l2_error"] = batch.truncation_l2_error;
  side["n"] = batch.n();
  side["dimension"] = batch.dim();
  std::ofstream(base_path + ".json") << side.dump(2) << "\n";
}

SampleBatch read_batch_csv(const std::string& base_path) {
  std::ifstream side(base_path + ".json");
  if (!side) throw Error("read_batch_csv: cannot open " + base_path + ".json");
  nlohmann::json j;
  side >> j;
  SampleBatch batch;
  batch.law_id = j.at("law_id").get<std::string>();
  if (j.contains("t")) batch.t = j.at("t").get<double>();
  batch.seed = j.at("seed").get<std::uint64_t>();
  batch.epsilon = j.at("epsilon").get<double>();
  batch.truncation_l2_error = j.at("truncation_l2_error").get<double>();
  const int n = j.at("n").get<int>();
  const int dim = j.at("dimension").get<int>();
  batch.points.resize(n, dim);

  std::ifstream csv(base_path + ".csv");
  if (!csv) throw Error("read_batch_csv: cannot open " + base_path + ".csv");
  std::string line;
  std::getline(csv, line);  // header
  for (int i = 0; i < n; ++i) {
    if (!std::getline(csv, line)) throw Error("read_batch_csv: truncated CSV");
    std::istringstream row(line);
    std::string cell;
    for (int a = 0; a < dim; ++a) {
      if (!std::getline(row, cell, ',')) throw Error("read_batch_csv: short row");
      batch.points(i, a) = std::stod(cell);
    }
  }
  return batch;
}

double empirical_cf_gap(const SDLawSpec& law, const SampleBatch& batch,
                        const std::vector<Vec>& frequencies) {
  double worst = 0.0;
  for (const Vec& xi : frequencies) {
    std::complex<double> emp{0.0, 0.0};
    for (int i = 0; i < batch.n(); ++i) {
      const double phase = xi.dot(batch.points.row(i));
      emp += std::complex<double>(std::cos(phase), std::sin(phase));
    }
    emp /= static_cast<double>(batch.n());
    std::complex<double> target;
    if (batch.t) {
      target = std::exp(log_cf_ratio(law, xi, *batch.t));
    } else {
      target = std::exp(log_cf(law, xi));
    }
    worst = std::max(worst, std::abs(emp - target));
  }
  return worst;
}

}  // namespace sdstein
