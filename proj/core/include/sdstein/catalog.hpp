#pragma once

// Catalog of self-decomposable families with closed-form characteristic
// functions and exact samplers, plus JSON/CSV loading of law specifications.
//
//   rot_inv_stable   k(r) = c r^{-alpha}, uniform lambda;
//                    log phi(xi) = -C ||xi||^alpha + i<xi, mean> with
//                    C = c * sigma_alpha * m_{alpha,d}
//   symmetric_stable antipodal atom pairs with power profiles
//   multi_gamma      independent Gamma(alpha_j, beta_j) coordinates
//   exp_profile      k(r) = alpha e^{-beta r} on a finite atom set
//   custom           any admissible polar decomposition
//
// sigma_alpha = int_0^inf (1 - cos v) v^{-1-alpha} dv = -Gamma(-alpha) cos(pi alpha / 2)
// m_{alpha,d} = E |<e_1, Theta>|^alpha, Theta uniform on S^{d-1}.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdstein/levy_model.hpp"

namespace sdstein::catalog {

double stable_sigma(double alpha);
double sphere_abs_moment(int dim, double alpha);

/// Rotationally invariant alpha-stable law. By default the profile is the
/// bare k(r) = r^{-alpha} and C is derived; passing `scale_C` rescales the
/// profile so that log phi = -scale_C ||xi||^alpha.
SDLawSpec rot_inv_stable(int dim, double alpha, std::optional<double> scale_C = {});

/// Symmetric alpha-stable with discrete lambda; atoms must come in antipodal
/// pairs of equal weight. All atoms share the profile coeff * r^{-alpha}.
SDLawSpec symmetric_stable(double alpha, std::vector<SphericalAtom> atoms,
                           double coeff = 1.0);

/// Gamma(shape, rate) on the positive half-line: single atom at +1 with
/// k(r) = shape * exp(-rate r), mean shape/rate.
SDLawSpec gamma1d(double shape, double rate);

/// Independent Gamma(shape_j, rate_j) coordinates.
SDLawSpec multi_gamma(const Vec& shape, const Vec& rate);

/// Gamma-type law with exponential radial profile alpha e^{-beta r} over the
/// given atoms. Default mean is the natural one of the positive-jump
/// construction, sum_a w_a (alpha/beta) x_a.
SDLawSpec exp_profile(std::vector<SphericalAtom> atoms, double alpha, double beta,
                      std::optional<Vec> mean = {});

SDLawSpec custom(int dim, std::vector<SphericalAtom> atoms,
                 std::vector<RadialProfile> profiles, Vec mean,
                 const std::string& id = "custom");

/// Law from its JSON description
///   {"family": ..., "dimension": d, "params": {...}, "mean": [...]}
/// Unknown fields are rejected.
SDLawSpec from_json(const nlohmann::json& j);
SDLawSpec load_law_file(const std::string& path);

/// Two-column CSV (r, k(r)) with strictly increasing r.
RadialProfile tabulated_profile_from_csv(const std::string& path);

/// The desk-scale laws exercised by the experiment registry.
std::vector<SDLawSpec> standard_catalog();

}  // namespace sdstein::catalog
