#include "sdstein/levy_model.hpp"

#include <cmath>

#include "sdstein/errors.hpp"
#include "sdstein/quadrature.hpp"

namespace sdstein {

namespace {

constexpr double kSphereMassTol = 1e-12;
constexpr double kDirectionMatchTol = 1e-9;

}  // namespace

PolarLevyMeasure::PolarLevyMeasure(int dim, std::vector<SphericalAtom> atoms,
                                   std::vector<RadialProfile> profiles) {
  if (dim < 1) throw Error("Levy measure: dimension must be >= 1");
  if (atoms.empty() || atoms.size() != profiles.size()) {
    throw Error("Levy measure: need one radial profile per spherical atom");
  }
  double mass = 0.0;
  for (auto& a : atoms) {
    if (a.direction.size() != dim) throw Error("Levy measure: atom dimension mismatch");
    const double norm = a.direction.norm();
    if (std::abs(norm - 1.0) > 1e-9) throw Error("Levy measure: atom direction not unit");
    a.direction /= norm;
    if (a.weight <= 0.0) throw Error("Levy measure: atom weights must be positive");
    mass += a.weight;
  }
  if (std::abs(mass - 1.0) > kSphereMassTol) {
    throw Error("Levy measure: spherical mass must equal 1 within 1e-12");
  }
  dim_ = dim;
  atoms_ = std::move(atoms);
  profiles_ = std::move(profiles);
}

PolarLevyMeasure PolarLevyMeasure::rotationally_invariant(int dim, RadialProfile profile) {
  if (dim < 1) throw Error("Levy measure: dimension must be >= 1");
  PolarLevyMeasure m;
  m.dim_ = dim;
  m.rotationally_invariant_ = true;
  m.profiles_.push_back(std::move(profile));
  return m;
}

const RadialProfile& PolarLevyMeasure::profile_at(const Vec& x) const {
  if (rotationally_invariant_) return profiles_[0];
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if ((atoms_[i].direction - x).norm() < kDirectionMatchTol) return profiles_[i];
  }
  throw UnknownDirection("direction is not a spherical atom of this Levy measure");
}

double PolarLevyMeasure::total_spherical_mass() const {
  if (rotationally_invariant_) return 1.0;
  double mass = 0.0;
  for (const auto& a : atoms_) mass += a.weight;
  return mass;
}

std::vector<PolarLevyMeasure::DirectionNode> PolarLevyMeasure::direction_nodes(
    int resolution) const {
  std::vector<DirectionNode> nodes;
  if (rotationally_invariant_) {
    for (const auto& s : sphere_rule(dim_, resolution)) {
      nodes.push_back({s.direction, s.weight, &profiles_[0]});
    }
  } else {
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      nodes.push_back({atoms_[i].direction, atoms_[i].weight, &profiles_[i]});
    }
  }
  return nodes;
}

PolarLevyMeasure PolarLevyMeasure::with_scaled_profiles(double factor) const {
  PolarLevyMeasure m = *this;
  for (auto& p : m.profiles_) p = p.scaled(factor);
  return m;
}

std::string family_name(Family f) {
  switch (f) {
    case Family::RotInvStable: return "rot_inv_stable";
    case Family::SymmetricStable: return "symmetric_stable";
    case Family::MultiGamma: return "multi_gamma";
    case Family::ExpProfile: return "exp_profile";
    case Family::Custom: return "custom";
  }
  return "custom";
}

double radial_profile_eval(const SDLawSpec& law, const Vec& x, double r) {
  if (r <= 0.0) throw NonPositiveRadius("radial_profile_eval: r must be positive");
  return law.levy.profile_at(x)(r);
}

namespace {

// One radial moment integrand per atom, integrated adaptively on (0,1] and
// continued geometrically on [1, inf). Divergence is decided analytically for
// power tails and by non-decaying panels otherwise.
double radial_moment_by_quadrature(const RadialProfile& profile, LevyMoment which) {
  auto integrand = [&](double r) -> double {
    const double k = profile(r);
    switch (which) {
      case LevyMoment::M2Total:
      case LevyMoment::M2Small:
        return r * k;
      case LevyMoment::M1Large:
        return k;
    }
    return 0.0;
  };

  // inner part (0, 1]
  double inner = 0.0;
  if (which != LevyMoment::M1Large) {
    AdaptiveOptions opts;
    opts.abs_tol = 1e-14;
    opts.rel_tol = 1e-8;
    // The integrand r * k(r) is integrable at 0 but may have an endpoint
    // singularity in derivative; split dyadically toward 0.
    double total = 0.0;
    double hi = 1.0;
    for (int level = 0; level < 60; ++level) {
      const double lo = hi / 16.0;
      total += integrate_adaptive(integrand, lo, hi, opts).value;
      const double piece = integrand(0.5 * lo) * lo;  // crude remaining-mass probe
      if (piece < 1e-15 * std::max(total, 1.0) || lo < 1e-250) break;
      hi = lo;
    }
    inner = total;
    if (which == LevyMoment::M2Small) return inner;
  }

  // outer part [1, inf)
  if (which == LevyMoment::M2Total && profile.second_moment_diverges()) return kInf;
  const double support_end = profile.support_end();
  if (std::isfinite(support_end)) {
    AdaptiveOptions opts;
    opts.abs_tol = 1e-14;
    opts.rel_tol = 1e-8;
    if (support_end <= 1.0) return inner;
    return inner + integrate_adaptive(integrand, 1.0, support_end, opts).value;
  }
  TailOptions tail_opts;
  tail_opts.abs_tol = 1e-12;
  const TailResult tail = integrate_tail(integrand, 1.0, tail_opts);
  if (!tail.converged) {
    if (which == LevyMoment::M1Large) {
      throw QuadratureFailure("first moment tail did not converge");
    }
    return kInf;
  }
  return inner + tail.value;
}

}  // namespace

double levy_moment(const SDLawSpec& law, LevyMoment which) {
  double total = 0.0;
  if (law.levy.is_rotationally_invariant()) {
    // lambda is a probability measure and the profile is shared, so the
    // spherical integral collapses to the radial one.
    return radial_moment_by_quadrature(law.levy.profile(0), which);
  }
  for (std::size_t i = 0; i < law.levy.atom_count(); ++i) {
    const double piece = radial_moment_by_quadrature(law.levy.profile(i), which);
    if (std::isinf(piece)) return kInf;
    total += law.levy.atom(i).weight * piece;
  }
  return total;
}

Vec levy_mean_large(const SDLawSpec& law) {
  Vec out = Vec::Zero(law.dim());
  for (const auto& node : law.levy.direction_nodes()) {
    out += node.weight * node.profile->first_moment(1.0, kInf) * node.direction;
  }
  return out;
}

AdmissibilityReport check_admissible(const SDLawSpec& law) {
  AdmissibilityReport rep;

  rep.sphere_mass = law.levy.total_spherical_mass();
  rep.normalized_sphere = std::abs(rep.sphere_mass - 1.0) <= kSphereMassTol;

  // monotonicity spot-check on a log-spaced grid
  double worst = 0.0;
  const auto nodes = law.levy.direction_nodes(8);
  for (const auto& node : nodes) {
    const double end = std::min(node.profile->support_end(), 1e6);
    double prev = (*node.profile)(1e-6);
    for (int i = 1; i <= 120; ++i) {
      const double r = 1e-6 * std::pow(end / 1e-6, i / 120.0);
      const double k = (*node.profile)(r);
      worst = std::max(worst, k - prev);
      prev = k;
    }
  }
  rep.worst_monotone_violation = worst;
  rep.profile_monotone = worst <= 1e-10;

  // int (r^2 /\ 1) k(r) dr / r  =  int_0^1 r k dr + int_1^inf k/r dr
  double small = 0.0, tail_mass = 0.0, first_large = 0.0;
  bool integrable = true, first_finite = true;
  for (const auto& node : nodes) {
    auto inner = [&](double r) { return r * (*node.profile)(r); };
    AdaptiveOptions opts;
    opts.abs_tol = 1e-12;
    opts.rel_tol = 1e-8;
    opts.throw_on_failure = false;
    double inner_val = 0.0;
    double hi = 1.0;
    for (int level = 0; level < 40; ++level) {
      const double lo = hi / 16.0;
      inner_val += integrate_adaptive(inner, lo, hi, opts).value;
      if (inner(0.5 * lo) * lo < 1e-14 || lo < 1e-200) break;
      hi = lo;
    }
    small += node.weight * inner_val;

    const double support_end = node.profile->support_end();
    auto mass_tail = [&](double r) { return (*node.profile)(r) / r; };
    auto first_tail = [&](double r) { return (*node.profile)(r); };
    if (std::isfinite(support_end)) {
      if (support_end > 1.0) {
        tail_mass += node.weight * integrate_adaptive(mass_tail, 1.0, support_end, opts).value;
        first_large += node.weight * integrate_adaptive(first_tail, 1.0, support_end, opts).value;
      }
    } else {
      const TailResult mass_res = integrate_tail(mass_tail, 1.0);
      const TailResult first_res = integrate_tail(first_tail, 1.0);
      integrable = integrable && mass_res.converged;
      first_finite = first_finite && first_res.converged;
      tail_mass += node.weight * mass_res.value;
      first_large += node.weight * first_res.value;
    }
  }
  rep.small_jump_integral = small + tail_mass;
  rep.small_jump_integrable = integrable && std::isfinite(rep.small_jump_integral);
  rep.large_jump_first_moment = first_large;
  rep.first_moment_finite = first_finite && std::isfinite(first_large);

  // cond_kx at a probe a > 0: sup over atoms of k_x(a+)
  double witness = 0.0;
  for (const auto& node : nodes) {
    for (const double a : {1e-3, 1e-1, 1.0, 10.0}) {
      witness = std::max(witness, node.profile->right_limit(a));
    }
  }
  rep.cond_kx_witness = witness;
  rep.cond_kx = std::isfinite(witness);

  return rep;
}

}  // namespace sdstein
