#pragma once

// Self-decomposable laws through the polar decomposition of their Levy
// measure:
//   nu(B) = int_{S^{d-1}} lambda(dx) int_0^inf 1_B(r x) k_x(r) dr / r,
// with lambda a probability measure on the sphere and each k_x non-increasing
// and right-continuous. Two representable forms of lambda: a finite atom list
// and a symbolic rotationally invariant (uniform) measure. A law is the pair
// (mean vector, Levy measure) plus an optional catalog family tag that closed
// form characteristic functions and samplers key on.

#include <optional>
#include <string>
#include <vector>

#include "sdstein/radial_profile.hpp"
#include "sdstein/types.hpp"

namespace sdstein {

struct SphericalAtom {
  Vec direction;  // unit vector
  double weight;  // > 0, weights sum to 1
};

class PolarLevyMeasure {
 public:
  /// Placeholder state; real measures come from the checked constructors.
  PolarLevyMeasure() = default;

  /// Discrete spherical measure: one radial profile per atom.
  PolarLevyMeasure(int dim, std::vector<SphericalAtom> atoms,
                   std::vector<RadialProfile> profiles);

  /// Symbolic uniform measure on S^{d-1} with a single shared profile.
  static PolarLevyMeasure rotationally_invariant(int dim, RadialProfile profile);

  int dim() const { return dim_; }
  bool is_rotationally_invariant() const { return rotationally_invariant_; }

  std::size_t atom_count() const { return atoms_.size(); }
  const SphericalAtom& atom(std::size_t i) const { return atoms_[i]; }
  const RadialProfile& profile(std::size_t i) const {
    return rotationally_invariant_ ? profiles_[0] : profiles_[i];
  }

  /// Profile attached to the direction x: any unit vector for the
  /// rotationally invariant form, an atom direction otherwise.
  const RadialProfile& profile_at(const Vec& x) const;

  double total_spherical_mass() const;

  /// Quadrature representation of lambda: the atoms themselves, or a fixed
  /// sphere rule for the rotationally invariant form.
  struct DirectionNode {
    Vec direction;
    double weight;
    const RadialProfile* profile;
  };
  std::vector<DirectionNode> direction_nodes(int resolution = 32) const;

  PolarLevyMeasure with_scaled_profiles(double factor) const;

 private:
  int dim_ = 1;
  bool rotationally_invariant_ = false;
  std::vector<SphericalAtom> atoms_;      // empty when rotationally invariant
  std::vector<RadialProfile> profiles_;   // size 1 when rotationally invariant
};

enum class Family { RotInvStable, SymmetricStable, MultiGamma, ExpProfile, Custom };

std::string family_name(Family f);

/// A self-decomposable target: mean vector, polar Levy measure, catalog tag.
struct SDLawSpec {
  std::string id;
  Vec mean;
  PolarLevyMeasure levy;
  Family family = Family::Custom;

  // family parameters consumed by closed-form CF / sampler shortcuts
  double stable_alpha = 0.0;
  double stable_scale = 0.0;  // C in log phi = -C ||xi||^alpha (rot. invariant)
  Vec gamma_shape;            // multi_gamma / exp_profile shapes per atom
  Vec gamma_rate;

  int dim() const { return levy.dim(); }
};

enum class LevyMoment {
  M2Total,  // int ||u||^2 nu(du)
  M2Small,  // int_{||u|| <= 1} ||u||^2 nu(du)
  M1Large,  // int_{||u|| >= 1} ||u|| nu(du)
};

/// Evaluate k_x(r) for the law, exact for closed-form profiles.
double radial_profile_eval(const SDLawSpec& law, const Vec& x, double r);

/// Moment functional by adaptive quadrature (relative tolerance 1e-8);
/// +infinity when the integral diverges.
double levy_moment(const SDLawSpec& law, LevyMoment which);

/// Vector-valued large-jump mean int_{||u|| >= 1} u nu(du), needed by the
/// compound-Poisson target sampler's shift.
Vec levy_mean_large(const SDLawSpec& law);

struct AdmissibilityReport {
  bool normalized_sphere = false;
  bool profile_monotone = false;
  bool small_jump_integrable = false;
  bool first_moment_finite = false;
  bool cond_kx = false;

  // numeric evidence backing each verdict
  double sphere_mass = 0.0;
  double worst_monotone_violation = 0.0;
  double small_jump_integral = 0.0;
  double large_jump_first_moment = 0.0;
  double cond_kx_witness = 0.0;  // max over atoms of k_x(a+) at the probe a

  bool all() const {
    return normalized_sphere && profile_monotone && small_jump_integrable &&
           first_moment_finite && cond_kx;
  }
};

/// Run every admissibility check; failures are reported, never thrown.
AdmissibilityReport check_admissible(const SDLawSpec& law);

}  // namespace sdstein
