#pragma once

// Log-characteristic functions of the target law and of the interpolating
// laws mu_t, and densities q_t by Fourier inversion on lattices.
//
// With finite first moment and no Gaussian part,
//   log phi(xi) = i<xi, EX> + int (e^{i<xi,u>} - 1 - i<u,xi>) nu(du),
// and the polar decomposition reduces the integral to one radial integral per
// spherical direction. The interpolating law mu_t has
//   phi_t(xi) = phi(xi) / phi(e^{-t} xi).

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdstein/levy_model.hpp"

namespace sdstein {

/// log phi(xi); closed form for catalog families, radial quadrature otherwise.
std::complex<double> log_cf(const SDLawSpec& law, const Vec& xi);

/// The generic quadrature route, exposed so closed forms can be cross-checked.
std::complex<double> log_cf_quadrature(const SDLawSpec& law, const Vec& xi,
                                       double abs_tol = 1e-9, int sphere_resolution = 256);

/// log phi_t(xi) = log phi(xi) - log phi(e^{-t} xi), t >= 0.
std::complex<double> log_cf_ratio(const SDLawSpec& law, const Vec& xi, double t);

/// Compensated radial integral int_0^inf (e^{irs} - 1 - irs) k(r)/r dr.
std::complex<double> radial_cf_integral(const RadialProfile& profile, double s,
                                        double abs_tol = 1e-9);

/// Density values of mu_t on a regular lattice.
class DensityGrid {
 public:
  DensityGrid(Vec origin, double dx, int points_per_axis, std::vector<double> values,
              std::string law_id, double t);

  int dim() const { return static_cast<int>(origin_.size()); }
  int points_per_axis() const { return n_; }
  double dx() const { return dx_; }
  double cell_volume() const;
  long long size() const { return static_cast<long long>(values_.size()); }

  const std::vector<double>& values() const { return values_; }
  double value(const std::vector<int>& index) const;
  Vec point(const std::vector<int>& index) const;

  double total_mass() const;  // lattice sum x cell volume
  double min_value() const;

  /// CSV rows "x1,...,xd,value" plus a JSON sidecar with the grid metadata.
  void write_csv(const std::string& base_path) const;
  nlohmann::json metadata() const;

  const std::string& law_id() const { return law_id_; }
  double t() const { return t_; }

 private:
  Vec origin_;
  double dx_;
  int n_;
  std::vector<double> values_;
  std::string law_id_;
  double t_;
};

struct DensityGridParams {
  int points_per_axis = 0;        // 0: pick 256 (d=1), 128 (d=2), 32 (d=3)
  double cf_boundary_tol = 1e-8;  // |phi_t| at the frequency box boundary
  double tail_mass_tol = 1e-6;
  double min_extent_scales = 8.0;
  std::optional<double> frequency_extent;  // override Xi
};

/// Fourier inversion of phi_t on a lattice (d <= 3, t > 0).
DensityGrid density_by_inversion(const SDLawSpec& law, double t,
                                 const DensityGridParams& params = {});

/// int |d q_t / d x_axis| dx, the integrability diagnostic for the density
/// gradient; computed from the same lattice inversion with an i*xi factor.
double density_gradient_l1(const SDLawSpec& law, double t, int axis,
                           const DensityGridParams& params = {});

}  // namespace sdstein
