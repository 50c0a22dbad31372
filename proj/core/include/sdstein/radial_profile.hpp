#pragma once

// Radial profiles k(r) of a polar-decomposed Levy measure. Along a spherical
// atom the measure contributes k(r) dr / r, so the three radial functionals
// used everywhere are
//   mass(a,b)          = int_a^b k(r)/r dr      (jump intensity)
//   first_moment(a,b)  = int_a^b k(r) dr        (int r dnu along the ray)
//   second_moment(a,b) = int_a^b r k(r) dr      (int r^2 dnu along the ray)
// Supported kinds: c r^{-alpha} with alpha in (1,2), c e^{-beta r}, and a
// tabulated non-increasing step function (right-continuous).

#include <optional>
#include <string>
#include <vector>

#include "sdstein/types.hpp"

namespace sdstein {

class RadialProfile {
 public:
  enum class Kind { Power, Exponential, Tabulated };

  static RadialProfile power(double coeff, double alpha);
  static RadialProfile exponential(double coeff, double beta);
  /// Step profile from (r_i, k_i) with strictly increasing r_i; validates
  /// monotonicity unless `validate` is false (used to inject counterexamples
  /// in admissibility tests). k(r) = k_1 below the grid, 0 beyond it.
  static RadialProfile tabulated(std::vector<double> r, std::vector<double> k,
                                 bool validate = true);

  double operator()(double r) const;  // throws NonPositiveRadius for r <= 0

  Kind kind() const { return kind_; }
  double coeff() const { return coeff_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  /// Same shape with k multiplied by `factor`.
  RadialProfile scaled(double factor) const;

  // Exact (closed-form / exact step sums) radial functionals on (a, b],
  // 0 <= a < b <= infinity.
  double mass(double a, double b) const;
  double first_moment(double a, double b) const;
  double second_moment(double a, double b) const;

  bool second_moment_diverges() const;  // true for power tails (alpha < 2)
  bool mass_diverges_at_zero() const;   // k(0+) > 0 or power blow-up

  /// Right limit k(a+), the quantity bounded by the admissibility condition.
  double right_limit(double a) const;

  /// Largest radius carrying profile mass: finite grid end for tabulated
  /// profiles, infinity otherwise.
  double support_end() const;

  const std::vector<double>& grid_r() const { return grid_r_; }
  const std::vector<double>& grid_k() const { return grid_k_; }

 private:
  RadialProfile() = default;

  template <typename Fn>
  void for_each_segment(double a, double b, Fn&& fn) const;

  Kind kind_ = Kind::Power;
  double coeff_ = 1.0;
  double alpha_ = 1.5;
  double beta_ = 1.0;
  std::vector<double> grid_r_;
  std::vector<double> grid_k_;
};

}  // namespace sdstein
